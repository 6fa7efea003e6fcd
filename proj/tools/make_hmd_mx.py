#!/usr/bin/env python3
"""Assemble an HMD "Mx 1x1" style death-rate file from HMD period life tables.

The life tables (fltper_1x1, mltper_1x1, bltper_1x1) carry the central death
rate in their `mx` column. This script merges the three sexes into the
five-column layout (Year, Age, Female, Male, Total) read by the C++ parser.

Usage: make_hmd_mx.py FLTPER MLTPER BLTPER OUT [--years LO HI]
"""
import argparse


def read_mx(path):
    out = {}
    title = None
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if i == 0:
                title = line.split("\t")[0].strip()
                continue
            parts = line.split()
            if len(parts) < 3 or not parts[0].isdigit():
                continue
            out[(int(parts[0]), parts[1])] = parts[2]
    return title, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("female")
    ap.add_argument("male")
    ap.add_argument("total")
    ap.add_argument("out")
    ap.add_argument("--years", nargs=2, type=int, default=None)
    args = ap.parse_args()

    title, female = read_mx(args.female)
    _, male = read_mx(args.male)
    _, total = read_mx(args.total)
    country = title.split(",")[0]

    keys = sorted(male, key=lambda k: (k[0], int(k[1].rstrip("+"))))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"{country}, Death rates (period 1x1), assembled from HMD period "
                 "life tables (mx column)\n\n")
        fh.write("  Year          Age             Female            Male           Total\n")
        for year, age in keys:
            if args.years and not (args.years[0] <= year <= args.years[1]):
                continue
            f = female.get((year, age), ".")
            t = total.get((year, age), ".")
            fh.write(f"  {year:<4d}  {age:>11s}  {f:>17s}  {male[(year, age)]:>14s}  {t:>14s}\n")


if __name__ == "__main__":
    main()
