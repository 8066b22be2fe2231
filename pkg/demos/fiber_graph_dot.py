"""Build a ball of the incidence graph and write it as Graphviz DOT plus a summary.

    python demos/fiber_graph_dot.py --e 2 --radius 3 > ball.dot
    dot -Tsvg ball.dot > ball.svg
"""

import argparse
import sys

from rzlab import make_ext, make_field
from rzlab.fiber_graph import build_ball, closed_tails, export, graph_stats, required_precision


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kind", choices=["rp", "ru"], default="rp")
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--vt", type=int, default=1)
    ap.add_argument("--radius", type=int, default=3)
    a = ap.parse_args()
    prec = a.e * (a.radius + 6)
    F = make_field(1, a.e, precision=prec)
    ext = make_ext(F, "RU", vt=a.vt) if a.kind == "ru" else make_ext(F, "RP")
    assert F.precision >= required_precision(ext, a.radius)

    g = build_ball(None, a.radius, ext)
    sys.stdout.write(export(g, "dot").decode())
    st = graph_stats(g)
    print(f"// {st['lines']} lines, {st['points']} points, {st['edges']} edges", file=sys.stderr)
    for t in closed_tails(g):
        print(f"// tail at {t['attachment'][0]}: {t['lines']} lines, depth {t['max_drop']}", file=sys.stderr)


if __name__ == "__main__":
    main()
