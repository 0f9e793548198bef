"""Reference computations written independently of the package."""


def euclid(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def first_primes(count: int) -> list[int]:
    primes: list[int] = []
    n = 2
    while len(primes) < count:
        if all(n % p for p in primes if p * p <= n):
            primes.append(n)
        n += 1
    return primes
