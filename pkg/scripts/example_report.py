"""Everything computable about the 7x7 order-6 example, printed as a table.

Shows the traces tr(A^m J^2l), the sub-flip h-series, and the Lind zeta
coefficients from both the product formula and the subgroup sum.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from revzeta.fixtures import paper_example_6
from revzeta.sft_reversal import fixed_count_bruteforce, fixed_count_trace
from revzeta.zeta import SFTTraceCounts, generating_h, lind_zeta_direct, lind_zeta_product, ordinary_gf_rational


@dataclass(frozen=True)
class ReportConfig:
    m_max: int = 10
    h_order: int = 12
    zeta_order: int = 12
    brute_m_max: int = 6


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description="report on the 7x7 example")
    ap.add_argument("--m-max", type=int, default=ReportConfig.m_max)
    ap.add_argument("--h-order", type=int, default=ReportConfig.h_order)
    ap.add_argument("--zeta-order", type=int, default=ReportConfig.zeta_order)
    ap.add_argument("--brute-m-max", type=int, default=ReportConfig.brute_m_max)
    cfg = ReportConfig(**vars(ap.parse_args(argv)))
    sys_ = paper_example_6()

    print("m  " + "".join(f"{f'tr(A^m J^{2 * l})':>14}" for l in range(3)))
    for m in range(1, cfg.m_max + 1):
        row = [fixed_count_trace(sys_, m, l) for l in range(3)]
        check = ""
        if m <= cfg.brute_m_max:
            brute = [fixed_count_bruteforce(sys_, m, l) for l in range(3)]
            check = "  brute force agrees" if brute == row else f"  brute force {brute}"
        print(f"{m:<3}" + "".join(f"{v:>14}" for v in row) + check)
    for l in range(3):
        print(f"sum_m tr(A^m J^{2 * l}) t^m = {ordinary_gf_rational(sys_, l)}")

    cp = SFTTraceCounts(sys_)
    for d in (1, 3):
        h = generating_h(cp.flip(d), cfg.h_order)
        print(f"h for phi^{d}: " + ", ".join(h.to_strings()))

    prod = lind_zeta_product(sys_, cfg.zeta_order)
    direct = lind_zeta_direct(sys_, cfg.zeta_order)
    print(f"Lind zeta ({direct.meta['subgroups']} subgroups in the direct sum):")
    for i, (a, b) in enumerate(zip(prod.series.to_strings(), direct.series.to_strings())):
        print(f"  c_{i:<3}{a:>16}{'' if a == b else '  MISMATCH ' + b}")


if __name__ == "__main__":
    main()
