"""Regenerates the golden files from closed forms and an independent
mt19937_64 / Fisher-Yates implementation. Run from this directory."""

import json
import math

MASK = (1 << 64) - 1


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.index = 312

    def twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.index = 0

    def __call__(self):
        if self.index >= 312:
            self.twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


def bounded(engine, bound):
    threshold = ((1 << 64) - bound) % bound
    while True:
        r = engine()
        if r >= threshold:
            return r % bound


def permutation(n, seed):
    forward = list(range(1 << n))
    engine = MT19937_64(seed)
    for i in range(len(forward) - 1, 0, -1):
        j = bounded(engine, i + 1)
        forward[i], forward[j] = forward[j], forward[i]
    return forward


def identity_levels(n, s, count):
    g = math.sqrt(s * s + (1 - s) ** 2)
    out = []
    for j in range(n + 1):
        out += [n * (1 - g) / 2 + j * g] * math.comb(n, j)
        if len(out) >= count:
            break
    return out[:count]


with open("identity_n8_spectrum.csv", "w") as f:
    f.write("s,level,eigenvalue\n")
    for i in range(21):
        s = i / 20
        for level, e in enumerate(identity_levels(8, s, 25)):
            f.write(f"{s!r},{level},{e!r}\n")

pins = {
    "mt19937_64_seed_5489_first": MT19937_64(5489)(),
    "permutations": [
        {"n": 4, "seed": 1, "forward": permutation(4, 1)},
        {"n": 5, "seed": 42, "forward": permutation(5, 42)},
        {"n": 10, "seed": 7, "forward_head": permutation(10, 7)[:16]},
    ],
}
with open("permutations.json", "w") as f:
    json.dump(pins, f, indent=1)
    f.write("\n")
