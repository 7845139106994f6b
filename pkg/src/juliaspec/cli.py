"""Command-line front end.

Every subcommand is deterministic given its arguments: seeds default to
0, artifacts embed their full configuration, and files are written
atomically (temp file then rename) so an interrupted run never leaves a
half-written artifact. Exit codes: 0 success, 1 a check or numerical
step failed, 2 usage errors (argparse's convention).
"""

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, chain, julia, numeration, operator, qseq, spectra


def _write_atomic(path, data):
    """Write bytes or text to path via a temp file in the same directory."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".juliaspec-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def _comment(tag, doc):
    """Single-line config header for CSV artifacts."""
    return "# juliaspec %s %s" % (tag, json.dumps(doc, sort_keys=True))


def _config(args, keys):
    return {k: getattr(args, k) for k in keys}


def _grid_from(args):
    w = args.window
    return julia.GridSpec(w[0], w[1], w[2], w[3], args.res[0], args.res[1])


def _cmd_simulate(args):
    rng = chain.RngStream(args.seed)
    traj = chain.trajectory(args.start, args.steps, args.p, rng, args.base)
    lines = [_comment("simulate", _config(args, ["base", "p", "start", "steps", "samples", "seed"]))]
    lines.append("step,state")
    lines.extend("%d,%d" % (i, x) for i, x in enumerate(traj))
    _write_atomic(args.out + ".trajectory.csv", "\n".join(lines) + "\n")

    hist_lines = [lines[0], "source,target,exact,empirical"]
    sampler = chain.binary_sample if args.base == "binary" else chain.fib_sample
    for idx, state in enumerate(args.states):
        srng = rng.spawn(idx)
        exact = chain.row(args.base, state, args.p).entries
        counts = dict.fromkeys(exact, 0)
        for _ in range(args.samples):
            counts[sampler(state, args.p, srng)] += 1
        for tgt in sorted(exact):
            hist_lines.append(
                "%d,%d,%.17g,%.17g" % (state, tgt, exact[tgt], counts[tgt] / args.samples)
            )
    _write_atomic(args.out + ".histogram.csv", "\n".join(hist_lines) + "\n")
    print("wrote %s.trajectory.csv and %s.histogram.csv" % (args.out, args.out))
    return 0


def _cmd_row(args):
    r = chain.row(args.base, args.n, args.p)
    doc = {str(k): v for k, v in r.entries.items()}
    text = json.dumps(doc, sort_keys=True, separators=(",", ": "))
    print(text)
    if args.out:
        wrapped = {
            "config": _config(args, ["base", "p", "n"]),
            "row": doc,
            "version": __version__,
        }
        _write_atomic(args.out, _json_text(wrapped))
    return 0


def _cmd_matrix(args):
    S = operator.build_truncated(args.base, args.p, args.size)
    text = operator.export_text(S)
    if args.out:
        _write_atomic(args.out, text)
        print("wrote %s (%d rows, %d complete)" % (args.out, S.size, S.complete_rows))
    else:
        sys.stdout.write(text)
    return 0


def _cmd_qseq(args):
    lam = complex(args.lam[0], args.lam[1])
    orbit = qseq.QOrbit(args.base, lam, args.p)
    lines = [
        _comment("qseq", _config(args, ["base", "p", "n"]) | {"lambda": args.lam}),
        "n,re,im",
    ]
    for k in range(args.n + 1):
        v = orbit.value(k)
        lines.append("%d,%.17g,%.17g" % (k, v.real, v.imag))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_atomic(args.out, text)
        print("wrote %s" % args.out)
    else:
        sys.stdout.write(text)
    return 0


def _raster_cmd(args, base):
    grid = _grid_from(args)
    if base == "binary":
        raster = julia.filled_julia_grid(args.p, grid, args.iters, args.resc)
    else:
        raster = julia.ep_grid(args.p, grid, args.iters, args.resc)
    _write_atomic(args.out, julia.ppm_bytes(raster))
    sidecar = os.path.splitext(args.out)[0] + ".json"
    _write_atomic(sidecar, julia.sidecar_json(raster))
    print(
        "wrote %s and %s (%d bounded of %d pixels)"
        % (args.out, sidecar, raster.bounded_count, grid.width * grid.height)
    )
    return 0


def _cmd_julia(args):
    return _raster_cmd(args, "binary")


def _cmd_ep(args):
    return _raster_cmd(args, "fib")


def _cmd_residual(args):
    lam = complex(args.lam[0], args.lam[1])
    if args.base == "binary":
        fn = spectra.residual_binary
        nmin = 1
    else:
        fn = spectra.residual_fib
        nmin = 2
    residuals = [[n, fn(lam, args.p, n, args.alpha)] for n in range(nmin, args.nmax + 1)]
    gap = spectra.residual_identity(lam, args.p, args.terms)
    evidence = spectra.candidate_evidence(lam, args.p, args.terms)
    doc = {
        "config": _config(args, ["base", "p", "alpha", "nmax", "terms"])
        | {"lambda": args.lam},
        "residuals": residuals,
        "identity_applicable": not math.isnan(gap),
        "identity_gap": None if math.isnan(gap) else gap,
        "flags": {
            "q_bounded": evidence["q_bounded"],
            "inv_q_bounded": evidence["inv_q_bounded"],
            "identity_holds": evidence["identity_holds"],
        },
        "thresholds": {
            "q_bound": spectra.Q_BOUND,
            "inv_q_bound": spectra.INV_Q_BOUND,
            "identity_tol": spectra.IDENTITY_TOL,
            "horizon_bits": spectra.HORIZON_BITS,
        },
        "version": __version__,
    }
    text = _json_text(doc)
    if args.out:
        _write_atomic(args.out, text)
        print("wrote %s" % args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_candidates(args):
    table = spectra.residual_candidates(args.p, args.depth, args.terms)
    lines = [
        _comment(
            "candidates",
            _config(args, ["p", "depth", "terms"])
            | {
                "q_bound": spectra.Q_BOUND,
                "inv_q_bound": spectra.INV_Q_BOUND,
                "identity_tol": spectra.IDENTITY_TOL,
            },
        ),
        "re,im,q_max,q_min,identity_gap,q_bounded,inv_q_bounded,identity_holds",
    ]
    for ev in table:
        z = ev["point"]
        lines.append(
            "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d"
            % (
                z.real,
                z.imag,
                ev["q_max"],
                ev["q_min"],
                ev["identity_gap"],
                ev["q_bounded"],
                ev["inv_q_bounded"],
                ev["identity_holds"],
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_atomic(args.out, text)
        print("wrote %s (%d candidates)" % (args.out, len(table)))
    else:
        sys.stdout.write(text)
    return 0


def _cmd_eig(args):
    grid = _grid_from(args)
    report = spectra.truncation_spectrum_report(
        args.base, args.p, args.size, grid, args.iters, args.resc, args.eps
    )
    _write_atomic(args.out, report["csv"])
    sys.stdout.write(_json_text(report["summary"]))
    return 0


def _verify_checks(base, p, seed):
    """(name, callable) pairs; each returns (ok, detail)."""
    rng = chain.RngStream(seed)

    def codec_roundtrip():
        for n in range(30000):
            if numeration.binary_decode(numeration.binary_encode(n)) != n:
                return False, "binary mismatch at %d" % n
            if numeration.zeckendorf_decode(numeration.zeckendorf_encode(n)) != n:
                return False, "fib mismatch at %d" % n
        return True, "n < 30000"

    def successor_binary():
        w = []
        for n in range(30000):
            w = numeration.binary_increment(w)
            if w != numeration.binary_encode(n + 1):
                return False, "at %d" % n
        return True, "n < 30000"

    def successor_fib():
        w = []
        for n in range(20000):
            w = numeration.zeckendorf_increment(w)
            if w != numeration.zeckendorf_encode(n + 1):
                return False, "at %d" % n
        return True, "n < 20000"

    def row_sums():
        worst = 0.0
        for n in range(3000):
            worst = max(worst, abs(chain.row(base, n, p).total() - 1.0))
        return worst <= 1e-12, "max gap %.3g" % worst

    def histogram():
        worst = 0.0
        for idx, n in enumerate((3, 10)):
            gap = chain.histogram_check(n, p, 20000, rng.spawn(idx), base)
            worst = max(worst, gap)
        # 5 sigma on 2e4 draws of a worst-case half/half entry
        bound = 5.0 * math.sqrt(0.25 / 20000)
        return worst <= bound, "max gap %.3g (bound %.3g)" % (worst, bound)

    def tilde_square():
        gap = operator.tilde_square_check(p, 64, seed=seed)
        return gap <= 1e-12, "gap %.3g" % gap

    def self_similarity():
        return operator.self_similarity_check(p, 8), "scale 8"

    def conjugacy():
        nprng = np.random.default_rng(seed)
        worst = 0.0
        pairs = 0
        for _ in range(10):
            lam = complex(*nprng.uniform(-1, 1, 2))
            orbit = qseq.QOrbit("binary", lam, p)
            z = complex(lam)
            for n in range(15):
                qv = orbit.pow_value(n)
                hv = qseq.h_map(z, p)
                if abs(qv) < 1e50 and abs(hv) < 1e50:
                    scale = max(1.0, abs(qv))
                    worst = max(worst, abs(qv - hv) / scale)
                    pairs += 1
                z = qseq.f_map(z, p)
        return worst <= 1e-9 and pairs > 20, "max rel gap %.3g over %d pairs" % (worst, pairs)

    def residual_decay():
        fn = spectra.residual_binary if base == "binary" else spectra.residual_fib
        lo = 5
        vals = [fn(1.0, p, n) for n in range(lo, 15)]
        ok = all(b < a for a, b in zip(vals, vals[1:]))
        return ok, "r(14)/r(5) = %.3g" % (vals[-1] / vals[0])

    def identity_geometric():
        gap = spectra.residual_identity(1.0, p, 30)
        want = p ** 30
        return abs(gap - want) <= 1e-14, "gap %.3g vs p^30 %.3g" % (gap, want)

    def preimage_bounded():
        pts = julia.preimages_of_one(p, 6)
        bad = sum(julia.escapes_f(z, p, 30) != julia.BOUNDED for z in pts)
        return bad == 0, "%d points" % len(pts)

    def escape_equivalence():
        nprng = np.random.default_rng(seed)
        bad = 0
        used = 0
        for _ in range(500):
            lam = complex(*nprng.uniform(-2, 2, 2))
            e1 = julia.ep_escape(lam, p, 60)
            u0 = qseq.h_inv(lam, p)
            u1 = qseq.h_inv(lam * lam, p)
            e2 = julia.g_orbit_escapes((u1, u0), p, 60)
            if (e1 != julia.BOUNDED and e1 >= 58) or (e2 != julia.BOUNDED and e2 >= 58):
                continue
            used += 1
            bad += (e1 == julia.BOUNDED) != (e2 == julia.BOUNDED)
        return bad == 0, "%d disagreements on %d usable points" % (bad, used)

    checks = [
        ("codec roundtrip", codec_roundtrip),
        ("successor binary", successor_binary),
        ("successor fib", successor_fib),
        ("row sums", row_sums),
        ("sampler histogram", histogram),
        ("identity geometric", identity_geometric),
        ("preimage boundedness", preimage_bounded),
        ("escape equivalence", escape_equivalence),
        ("residual decay", residual_decay),
    ]
    if base == "binary":
        checks.insert(5, ("tilde square", tilde_square))
        checks.insert(6, ("self similarity", self_similarity))
        checks.insert(7, ("conjugacy", conjugacy))
    return checks


def _cmd_verify(args):
    failures = 0
    for name, fn in _verify_checks(args.base, args.p, args.seed):
        ok, detail = fn()
        print("%s %-22s %s" % ("ok  " if ok else "FAIL", name, detail))
        failures += not ok
    return 1 if failures else 0


def _add_common(sp, base_default="binary"):
    sp.add_argument("--base", choices=("binary", "fib"), default=base_default)
    sp.add_argument("--p", type=float, default=0.7, help="carry probability")


def _add_grid(sp, window):
    sp.add_argument("--window", type=float, nargs=4, default=window,
                    metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    sp.add_argument("--res", type=int, nargs=2, default=[512, 512],
                    metavar=("W", "H"))
    sp.add_argument("--iters", type=int, default=300)
    sp.add_argument("--resc", type=float, default=4.0, help="escape radius")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="juliaspec",
        description="stochastic adding machines and the sets their spectra trace",
    )
    ap.add_argument("--version", action="version", version="juliaspec " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="sample trajectories and histograms")
    _add_common(sp)
    sp.add_argument("--start", type=int, default=0)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--states", type=int, nargs="+", default=[0, 1, 2, 3, 7, 10])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="simulate")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("row", help="one exact transition row as JSON")
    _add_common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_row)

    sp = sub.add_parser("matrix", help="truncated operator as text")
    _add_common(sp)
    sp.add_argument("--size", type=int, default=64)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_matrix)

    sp = sub.add_parser("qseq", help="q family values along one lambda")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", type=float, nargs=2, default=[1.0, 0.0],
                    metavar=("RE", "IM"))
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_qseq)

    sp = sub.add_parser("julia", help="escape raster of the squared map")
    sp.add_argument("--p", type=float, default=0.7)
    _add_grid(sp, [-1.5, 1.5, -1.5, 1.5])
    sp.add_argument("--out", default="julia.ppm")
    sp.set_defaults(func=_cmd_julia)

    sp = sub.add_parser("ep", help="escape raster of the power-pair recursion")
    sp.add_argument("--p", type=float, default=0.7)
    _add_grid(sp, [-2.0, 2.0, -2.0, 2.0])
    sp.add_argument("--out", default="ep.ppm")
    sp.set_defaults(func=_cmd_ep)

    sp = sub.add_parser("residual", help="residual decay report at one lambda")
    _add_common(sp)
    sp.add_argument("--lambda", dest="lam", type=float, nargs=2, default=[1.0, 0.0],
                    metavar=("RE", "IM"))
    sp.add_argument("--alpha", type=float, default=2.0)
    sp.add_argument("--nmax", type=int, default=20)
    sp.add_argument("--terms", type=int, default=30)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_residual)

    sp = sub.add_parser("candidates", help="evidence table for preimage candidates")
    sp.add_argument("--p", type=float, default=0.7)
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--terms", type=int, default=30)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_candidates)

    sp = sub.add_parser("eig", help="truncation spectrum against the raster")
    _add_common(sp)
    sp.add_argument("--size", type=int, default=256)
    _add_grid(sp, [-1.5, 1.5, -1.5, 1.5])
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--out", default="eig.csv")
    sp.set_defaults(func=_cmd_eig)

    sp = sub.add_parser("verify", help="run the fast property suite")
    _add_common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_verify)

    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OverflowError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
