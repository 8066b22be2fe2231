"""Print the index-1 neighbor tallies for every modular class of one field.

    python demos/neighbor_tables.py --kind ru --e 2 --vt 2 --f 2
"""

import argparse

from rzlab import make_ext, make_field
from rzlab.neighbor_walk import verify_neighbor_props


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kind", choices=["rp", "ru"], default="rp")
    ap.add_argument("--e", type=int, default=2)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--vt", type=int, default=1)
    a = ap.parse_args()
    F = make_field(a.f, a.e)
    ext = make_ext(F, "RU", vt=a.vt) if a.kind == "ru" else make_ext(F, "RP")
    rep = verify_neighbor_props(ext)
    print(f"{rep['kind']}  q={rep['q']}  e={rep['e']}  v(t)={rep['vt']}")
    for r in rep["rows"]:
        if r["status"] == "skipped":
            print(f"  case {r['case']}: skipped ({r['reason']})")
            continue
        seen = ", ".join(f"{c['count']} x (l={c['ell']}{', hyp' if c['hyperbolic'] else ''})" for c in r["observed"])
        print(f"  case {r['case']}  {r['from_i']:+d} -> {r['to_i']:+d}  l={r['ell']}:  {seen}  [{r['status']}]")


if __name__ == "__main__":
    main()
