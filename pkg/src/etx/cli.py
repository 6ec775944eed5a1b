"""Command-line front end.

Subcommands: ``check``, ``evolve``, ``fig2a``, ``fig2b``, ``fig3``,
``boundary`` and ``sweep``. Times on the command line are dimensionless,
``tau = gamma1 * t``. Exit status is 0 on success, 1 for invalid or unphysical
parameters and 2 for numerical failures.
"""

import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import channel as ch
from . import conditions, cqed, steady
from .dynamics import (
    BASIS,
    basis_state,
    evolve_expm,
    evolve_rk,
    fmt,
    linearized_entropy,
    negativity,
    read_trajectory_csv,
    validate_state,
    verify_trajectory_rows,
    write_rows,
)
from .errors import InvalidInput, NoSignChange, NumericalFailure
from .liouvillian import DissipatorSpec, cp_bound_closed, require_cp

FIG2_N = 2.4
FIG2_C = (1.58, 1.804, 2.18)
FIG3_PK = ((1.0, 2.5), (1.4, 2.5), (1.4, 3.5))

SWEEP_HEADER = ("param", "value", "cp", "gaussian_entangled", "ground_condition", "steady_negativity",
                "steady_linentropy", "max_negativity")
SWEEP_PARAMS = ("n", "m", "c", "gamma1", "gamma2")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_spec_args(p):
    g = p.add_argument_group("channel and coupling")
    g.add_argument("--n", type=float, default=1.0, help="local moment of mode 1 (vacuum = 1)")
    g.add_argument("--m", type=float, default=None, help="local moment of mode 2 (default: n)")
    g.add_argument("--c", type=float, default=None, help="correlation, sets c1 = -c2 = c")
    g.add_argument("--c1", type=float, default=None)
    g.add_argument("--c2", type=float, default=None)
    g.add_argument("--gamma1", type=float, default=1.0)
    g.add_argument("--gamma2", type=float, default=None, help="default: gamma1")
    g.add_argument("--preset", choices=sorted(cqed.PRESETS),
                   help="map through cavity-QED parameters with spontaneous emission")
    g.add_argument("--gamma-sp", type=float, default=None,
                   help="override the preset's spontaneous emission rate (rad/s)")


def _add_run_args(p, out_default="-"):
    p.add_argument("--init", default="gg", help=f"initial state: one of {', '.join(BASIS)}")
    p.add_argument("--init-csv", default=None, help="custom 4x4 initial state (real CSV)")
    p.add_argument("--t-max", type=float, default=10.0, help="final tau")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--method", choices=("rk", "expm"), default="rk")
    p.add_argument("--out", default=out_default)
    p.add_argument("--verify", action="store_true",
                   help="re-read written CSVs and check state invariants")


def build_parser():
    parser = _Parser(prog="etx", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key=value file; command-line flags override it")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="report every criterion for one parameter set")
    _add_spec_args(p)

    p = sub.add_parser("evolve", help="write one trajectory CSV")
    _add_spec_args(p)
    _add_run_args(p)

    for name, what in (("fig2a", "|gg>"), ("fig2b", "|ee>")):
        p = sub.add_parser(name, help=f"negativity curves from {what}, n=2.4, c in {FIG2_C}")
        p.add_argument("--out-dir", default=".")
        p.add_argument("--t-max", type=float, default=20.0)
        p.add_argument("--samples", type=int, default=401)
        p.add_argument("--verify", action="store_true")

    p = sub.add_parser("fig3", help="linearized entropy curves for three drive purities")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("boundary", help="closed-form vs bisected steady-state boundary table")
    p.add_argument("--n-values", default="1.2:4:5", help="list a,b,c or range start:stop:num")
    p.add_argument("--m-values", default=None, help="default: same as --n-values")
    p.add_argument("--ratios", default="0.5,1,2", help="gamma2/gamma1 values")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="-")

    p = sub.add_parser("sweep", help="scan one parameter with the others fixed")
    _add_spec_args(p)
    _add_run_args(p)
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True, help="list a,b,c or range start:stop:num")
    return parser


def read_config(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    config = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, val in config.items():
        action = known.get(key)
        if action is None:
            raise InvalidInput(f"{args.config}: unknown key {key!r} for '{args.command}'")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = action.type(val) if action.type else val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def parse_values(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidInput(f"range must be start:stop:num, got {text!r}")
        return list(np.linspace(float(parts[0]), float(parts[1]), int(parts[2])))
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInput(f"cannot parse value list {text!r}") from None


def _channel_from_args(a):
    m = a.n if a.m is None else a.m
    if a.c is not None:
        if a.c1 is not None or a.c2 is not None:
            raise InvalidInput("use either --c or --c1/--c2")
        return ch.MomentMatrix(a.n, m, a.c, -a.c)
    return ch.MomentMatrix(a.n, m, a.c1 or 0.0, a.c2 or 0.0)


def _check_channel(moments):
    if not ch.check_uncertainty(moments):
        lam = ch.uncertainty_margin(moments)
        msg = (f"uncertainty principle violated: M - sigma_y(+)sigma_y has eigenvalue "
               f"{lam:.4g} < 0 for n={moments.n:g}, m={moments.m:g}, "
               f"c1={moments.c1:g}, c2={moments.c2:g}")
        if moments.c is not None:
            msg += (f"; CP also needs c^2 <= min((m-1)(n+1), (m+1)(n-1)) "
                    f"= {cp_bound_closed(moments.n, moments.m) ** 2:.4g}")
        raise InvalidInput(msg)


def resolve_spec(a):
    """``(spec, notes)`` from parsed flags, with physicality and CP checked."""
    moments = _channel_from_args(a)
    _check_channel(moments)
    notes = []
    if a.preset:
        params = cqed.PRESETS[a.preset](gamma_sp=a.gamma_sp, channel=moments)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", cqed.RegimeWarning)
            spec, coop = cqed.map_with_spontaneous_decay(params)
        notes = [str(w.message) for w in caught]
        notes.append(f"cooperativity C = {coop:.6g}")
    else:
        g2 = a.gamma1 if a.gamma2 is None else a.gamma2
        spec = DissipatorSpec(moments.n, moments.m, moments.c1, moments.c2, a.gamma1, g2)
    require_cp(spec)
    return spec, notes


def resolve_init(a):
    if a.init_csv:
        rho = np.loadtxt(a.init_csv, delimiter=",", dtype=float, ndmin=2)
        if rho.shape != (4, 4):
            raise InvalidInput(f"{a.init_csv}: expected a 4x4 matrix, got {rho.shape}")
        return validate_state(rho.astype(complex))
    if a.init not in BASIS:
        raise InvalidInput(f"--init must be one of {BASIS} (got {a.init!r})")
    return basis_state(a.init)


def _run(spec, rho0, tau_max, samples, method):
    t_max = tau_max / spec.gamma1
    if method == "expm":
        return evolve_expm(spec, rho0, np.linspace(0.0, t_max, samples))
    return evolve_rk(spec, rho0, t_max, samples)


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def _verify(paths):
    for path in paths:
        bad = verify_trajectory_rows(read_trajectory_csv(path))
        if bad:
            k, msg = bad[0]
            raise NumericalFailure(f"{path}: row {k}: {msg} ({len(bad)} violations)")
        print(f"verified {path}", file=sys.stderr)


def _yes(flag):
    return "yes" if flag else "no"


def cmd_check(a):
    spec, notes = resolve_spec(a)
    moments = spec.channel
    out = [
        f"channel: n={fmt(spec.n)} m={fmt(spec.m)} c1={fmt(spec.c1)} c2={fmt(spec.c2)}",
        f"rates: gamma1={fmt(spec.gamma1)} gamma2={fmt(spec.gamma2)}",
    ]
    out += [f"note: {n}" for n in notes]
    out.append(f"uncertainty principle: satisfied "
               f"(margin {fmt(ch.uncertainty_margin(moments))})")
    out.append(f"Gaussian-entangled: {_yes(ch.is_gaussian_entangled(moments))}")
    symmetric = spec.c1 == -spec.c2
    if symmetric:
        out.append(f"CP: yes (c <= {fmt(cp_bound_closed(spec.n, spec.m))})")
        lhs, c2 = (spec.n - 1) * (spec.m - 1), spec.c1 ** 2
        out.append(f"ground-state condition: {_yes(conditions.sufficient_condition_ground(spec))} "
                   f"((n-1)(m-1)={fmt(lhs)} vs c^2={fmt(c2)})")
    else:
        out.append("CP: yes (numeric Kossakowski test)")
        out.append("ground-state condition: n/a (needs c1 = -c2)")
    exc = conditions.sufficient_condition_general(spec, conditions.EXCITED_ANGLES)
    out.append(f"excited-state condition: {_yes(exc.holds)}")
    found, best = conditions.exists_entangling_angles(spec)
    out.append(f"entangling angles: {_yes(found)} "
               f"(best theta={fmt(best.theta)} phi={fmt(best.phi)})")
    rho_ss = steady.steady_state(spec)
    neg_ss = float(negativity(rho_ss)[0])
    if symmetric and spec.n >= 1 and spec.m >= 1:
        c = spec.c1
        closed = steady.c_ss_closed_form(spec.n, spec.m, spec.gamma1, spec.gamma2)
        out.append(f"c_ss closed: {fmt(closed)}")
        try:
            num = steady.c_ss_numeric(spec.n, spec.m, spec.gamma1, spec.gamma2)
            out.append(f"c_ss numeric: {fmt(num)}")
        except NoSignChange as err:
            cont = steady.c_ss_continued(spec.n, spec.m, spec.gamma1, spec.gamma2)
            out.append(f"c_ss numeric: {fmt(cont)} (beyond CP bound {fmt(err.cp_bound)})")
        rel = ">=" if c >= closed else "<"
        out.append(f"steady-entangled: {_yes(neg_ss > steady.NEGATIVITY_THRESHOLD)} "
                   f"({fmt(c)} {rel} {closed:.4f})")
    else:
        out.append(f"steady-entangled: {_yes(neg_ss > steady.NEGATIVITY_THRESHOLD)}")
    out.append(f"steady negativity: {fmt(neg_ss)}")
    out.append(f"steady linearized entropy: {fmt(linearized_entropy(rho_ss))}")
    print("\n".join(out))


def cmd_evolve(a):
    spec, notes = resolve_spec(a)
    for n in notes:
        print(f"note: {n}", file=sys.stderr)
    traj = _run(spec, resolve_init(a), a.t_max, a.samples, a.method)
    fh, close = _open_out(a.out)
    try:
        traj.to_csv(fh)
    finally:
        if close:
            fh.close()
    if a.verify and a.out != "-":
        _verify([a.out])


def _write_curves(out_dir, jobs, verify):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, traj in jobs:
        path = out_dir / name
        traj.to_csv(path)
        paths.append(path)
    if verify:
        _verify(paths)
    return paths


def _pool_map(fn, items):
    workers = max(1, int(os.environ.get("ETX_THREADS", "1") or 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_fig2(a, init):
    def run(c):
        return _run(DissipatorSpec.symmetric(FIG2_N, c), basis_state(init), a.t_max,
                    a.samples, "rk")

    trajs = _pool_map(run, FIG2_C)
    jobs = [(f"{a.command}_c{c:g}.csv", t) for c, t in zip(FIG2_C, trajs)]
    _write_curves(a.out_dir, jobs, a.verify)
    print("c,max_negativity,final_negativity,tau_first_entangled")
    for c, t in zip(FIG2_C, trajs):
        hit = np.nonzero(t.negativity > 1e-10)[0]
        first = fmt(t.tau[hit[0]]) if hit.size else "none"
        print(f"{fmt(c)},{fmt(t.negativity.max())},{fmt(t.negativity[-1])},{first}")


def cmd_fig3(a):
    def run(pk):
        channel = ch.from_purity_correlation(*pk)
        return _run(DissipatorSpec.from_channel(channel), basis_state("gg"), a.t_max,
                    a.samples, "rk")

    trajs = _pool_map(run, FIG3_PK)
    jobs = [(f"fig3_p{p:g}_k{k:g}.csv", t) for (p, k), t in zip(FIG3_PK, trajs)]
    _write_curves(a.out_dir, jobs, a.verify)
    print("p,k,n,c,final_linentropy,steady_linentropy")
    for (p, k), t in zip(FIG3_PK, trajs):
        channel = ch.from_purity_correlation(p, k)
        sl = linearized_entropy(steady.steady_state(DissipatorSpec.from_channel(channel)))
        print(f"{fmt(p)},{fmt(k)},{fmt(channel.n)},{fmt(channel.c1)},"
              f"{fmt(t.linearized_entropy[-1])},{fmt(sl)}")


def cmd_boundary(a):
    ns = parse_values(a.n_values)
    ms = parse_values(a.m_values) if a.m_values else ns
    ratios = parse_values(a.ratios)
    points = [(n, m, r) for n in ns for m in ms for r in ratios]
    results = _pool_map(lambda p: steady.boundary_result(p[0], p[1], 1.0, p[2], a.tol), points)
    fh, close = _open_out(a.out)
    try:
        write_rows(fh, steady.BOUNDARY_HEADER, (r.row() for r in results))
    finally:
        if close:
            fh.close()
    beyond = sum(not r.within_cp for r in results)
    if beyond:
        print(f"note: {beyond} of {len(results)} points have c_ss beyond the CP bound; "
              "their numeric value comes from the continued kernel", file=sys.stderr)
    bad = [r for r in results if not r.consistent]
    if bad:
        raise NumericalFailure(f"{len(bad)} boundary points disagree beyond 1e-3")


def sweep_point(a, name, value):
    moments = _channel_from_args(a)
    fields = dict(n=moments.n, m=moments.m, c1=moments.c1, c2=moments.c2, gamma1=a.gamma1,
                  gamma2=a.gamma1 if a.gamma2 is None else a.gamma2)
    if name == "c":
        fields["c1"], fields["c2"] = value, -value
    else:
        fields[name] = value
        if name == "n" and a.m is None:
            fields["m"] = value
        if name == "gamma1" and a.gamma2 is None:
            fields["gamma2"] = value
    nan = float("nan")
    try:
        spec = DissipatorSpec(**fields)
        require_cp(spec)
        if not ch.check_uncertainty(spec.channel):
            raise InvalidInput("uncertainty violated")
    except InvalidInput:
        return (name, value, 0, nan, nan, nan, nan, nan)
    ent = ch.is_gaussian_entangled(spec.channel)
    ground = int(conditions.sufficient_condition_ground(spec)) if spec.c1 == -spec.c2 else nan
    rho_ss = steady.steady_state(spec)
    traj = _run(spec, resolve_init(a), a.t_max, a.samples, a.method)
    return (name, value, 1, int(ent), ground,
            float(negativity(rho_ss)[0]), float(linearized_entropy(rho_ss)),
            float(traj.negativity.max()))


def cmd_sweep(a):
    values = parse_values(a.values)
    rows = _pool_map(lambda v: sweep_point(a, a.param, v), values)
    fh, close = _open_out(a.out)
    try:
        write_rows(fh, SWEEP_HEADER, rows)
    finally:
        if close:
            fh.close()


COMMANDS = {
    "check": cmd_check,
    "evolve": cmd_evolve,
    "fig2a": lambda a: cmd_fig2(a, "gg"),
    "fig2b": lambda a: cmd_fig2(a, "ee"),
    "fig3": cmd_fig3,
    "boundary": cmd_boundary,
    "sweep": cmd_sweep,
}


def main(argv=None):
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except InvalidInput as exc:
        print(f"etx: invalid input: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"etx: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"etx: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
