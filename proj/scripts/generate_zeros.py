#!/usr/bin/env python3
"""Regenerate the zero table used by the explicit-formula code.

Writes one `z a b` line per nontrivial zeta zero rho = 1/2 + i z, with
  a = 1 / |rho * zeta'(rho)|
  b = -arg(rho * zeta'(rho)), reduced into [-pi, pi)
using mpmath at the requested working precision.

    python3 scripts/generate_zeros.py --count 2000 --digits 30 -o data/zeros_2000.txt
"""
import argparse
import sys

import mpmath


def zero_row(index, digits):
    mpmath.mp.dps = digits + 15
    rho = mpmath.zetazero(index)
    w = rho * mpmath.zeta(rho, derivative=1)
    a = 1 / abs(w)
    b = -mpmath.arg(w)
    if b >= mpmath.pi:
        b -= 2 * mpmath.pi
    return (mpmath.nstr(rho.imag, digits, strip_zeros=False),
            mpmath.nstr(a, digits, strip_zeros=False),
            mpmath.nstr(b, digits, strip_zeros=False))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--digits", type=int, default=30)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    out = sys.stdout if args.output == "-" else open(args.output, "w")
    out.write("# Nontrivial zeros of the Riemann zeta function, rho_i = 1/2 + i z_i\n")
    out.write("# columns: z_i  a_i = 1/|rho_i zeta'(rho_i)|  b_i = -arg(rho_i zeta'(rho_i))\n")
    out.write(f"# source: mpmath {mpmath.__version__}, zetazero + zeta(derivative=1), "
              f"{args.digits} significant digits\n")
    for i in range(1, args.count + 1):
        z, a, b = zero_row(i, args.digits)
        out.write(f"{z} {a} {b}\n")
        out.flush()
        if i % 100 == 0:
            print(f"{i} zeros", file=sys.stderr)


if __name__ == "__main__":
    main()
