#!/usr/bin/env python3
"""Reference for the counter-based stream (Philox4x64-10) frozen in
test_philox.cpp.

Convention: key = (seed, tweak), counter = (block, trajectory, cell, 0).
The block index increments after each 4-word batch, so the first batch is
produced from block 0. Within a round, with products p0 = M0 * c0 and
p1 = M1 * c2, the next state is
    (hi(p1) ^ c1 ^ k0, lo(p1), hi(p0) ^ c3 ^ k1, lo(p0)),
and the key gains the Weyl increments after every round but the last.
"""

MASK = (1 << 64) - 1
TWEAK = 0x9E3779B97F4A7C15
MUL0 = 0xD2E7470EE14C6C93
MUL1 = 0xCA5A826395121157
WEYL0 = 0x9E3779B97F4A7C15
WEYL1 = 0xBB67AE8584CAA73B


def philox_block(counter, key):
    c = list(counter)
    k0, k1 = key
    for rnd in range(10):
        p0 = MUL0 * c[0]
        p1 = MUL1 * c[2]
        c = [
            (p1 >> 64) ^ c[1] ^ k0,
            p1 & MASK,
            (p0 >> 64) ^ c[3] ^ k1,
            p0 & MASK,
        ]
        if rnd < 9:
            k0 = (k0 + WEYL0) & MASK
            k1 = (k1 + WEYL1) & MASK
    return c


def words(seed, cell, trajectory, count):
    out = []
    block = 0
    while len(out) < count:
        out += philox_block((block, trajectory, cell, 0), (seed, TWEAK))
        block += 1
    return out[:count]


def main():
    for seed, cell, traj in [
        (0, 0, 0),
        (42, 0, 0),
        (42, 3, 12345),
        (2**64 - 1, 2**32, 999_999_999_999),
    ]:
        print(f"words for (seed={seed}, cell={cell}, trajectory={traj}):")
        for w in words(seed, cell, traj, 6):
            print(f"    0x{w:016x}")

    print("doubles for (seed=42, cell=0, trajectory=0), (w >> 11) * 2^-53:")
    for w in words(42, 0, 0, 4):
        print(f"    {(w >> 11) * 2.0 ** -53!r}")

    w0 = words(42, 0, 0, 1)[0]
    print("first 8 bits of word 0, served LSB first:",
          [(w0 >> i) & 1 for i in range(8)])


if __name__ == "__main__":
    main()
