"""Run the K0 and automorphism-lifting checks over a list of finite groups
and print one summary line per group."""

import argparse
import time

from graphk0.abelian import enumerate_automorphisms, parse_group_spec
from graphk0.gamma import GammaContext, verify_lift_embedding, verify_mc1, verify_mc2, verify_relations

DEFAULT_GROUPS = ["0", "Z/2", "Z/3", "Z/4", "Z/5", "Z/6", "Z/8", "Z/12",
                  "Z/2 x Z/2", "Z/2 x Z/4", "Z/3 x Z/9"]


def check(spec: str, lift: bool) -> tuple[bool, str]:
    group = parse_group_spec(spec)
    t0 = time.perf_counter()
    ctx = GammaContext.of(group)
    reports = [verify_mc1(group, ctx), verify_relations(group, ctx)]
    lifted = "lifting skipped"
    if lift:
        results = [verify_mc2(group, phi, ctx) for phi in enumerate_automorphisms(group)]
        lifted = f"{len(results)} automorphisms lifted"
        reports += [r.report for r in results] + [verify_lift_embedding(results)]
    ok = all(r.passed for r in reports)
    detail = (f"{len(ctx.graph.vertices)} vertices, K0 = {ctx.k.group}, "
              f"{lifted}, {time.perf_counter() - t0:.2f}s")
    return ok, detail


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("groups", nargs="*", default=DEFAULT_GROUPS)
    ap.add_argument("--max-lift-order", type=int, default=16,
                    help="skip automorphism lifting for larger groups")
    args = ap.parse_args()
    all_ok = True
    for spec in args.groups:
        lift = parse_group_spec(spec).order <= args.max_lift_order
        ok, detail = check(spec, lift)
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'} {spec:<12} {detail}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
