"""Reference EQ partition of S^2 (recursive zonal equal area) in mpmath.

Prints zone colatitudes, region counts and the first few cell centers for a
given n so the Rust implementation can be checked against frozen values.
"""
import sys
from math import gcd

import mpmath as mp

mp.mp.dps = 30


def cap_area(theta):
    return 2 * mp.pi * (1 - mp.cos(theta))


def cap_colatitude(area):
    return 2 * mp.asin(mp.sqrt(area / (4 * mp.pi)))


def partition(n):
    if n == 1:
        return [mp.pi], [1]
    area = 4 * mp.pi / n
    theta_c = cap_colatitude(area)
    if n == 2:
        return [theta_c, mp.pi], [1, 1]
    ideal = mp.sqrt(area)
    n_collars = max(1, int(mp.nint((mp.pi - 2 * theta_c) / ideal)))
    fit = (mp.pi - 2 * theta_c) / n_collars
    ideal_counts = []
    for k in range(1, n_collars + 1):
        a = theta_c + (k - 1) * fit
        b = theta_c + k * fit
        ideal_counts.append((cap_area(b) - cap_area(a)) / area)
    counts, carry = [], mp.mpf(0)
    for x in ideal_counts:
        r = int(mp.nint(x + carry))
        carry += x - r
        counts.append(r)
    regions = [1] + counts + [1]
    cols, acc = [], 0
    for r in regions[:-1]:
        acc += r
        cols.append(cap_colatitude(acc * area))
    cols.append(mp.pi)
    return cols, regions


def centers(n):
    cols, regions = partition(n)
    out, offset, top = [], mp.mpf(0), 0
    for z, count in enumerate(regions):
        lo = 0 if z == 0 else cols[z - 1]
        hi = cols[z]
        if count == 1 and (z == 0 or z == len(regions) - 1):
            theta = mp.mpf(0) if z == 0 else mp.pi
            out.append((theta, mp.mpf(0)))
        else:
            if z > 1:
                offset += mp.mpf(1) / (2 * count) - mp.mpf(1) / (2 * top) + mp.mpf(gcd(count, top)) / (2 * count * top)
                offset -= mp.floor(offset)
            theta = (lo + hi) / 2
            for j in range(count):
                out.append((theta, 2 * mp.pi * ((j + mp.mpf(1) / 2) / count + offset)))
        top = count
    return cols, regions, out


if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    cols, regions, pts = centers(n)
    print("regions", regions)
    print("colatitudes", [mp.nstr(c, 20) for c in cols])
    for theta, phi in pts:
        x = mp.sin(theta) * mp.cos(phi)
        y = mp.sin(theta) * mp.sin(phi)
        z = mp.cos(theta)
        print(mp.nstr(x, 20), mp.nstr(y, 20), mp.nstr(z, 20))
