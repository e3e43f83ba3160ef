"""Command line: ``hres build`` exports complexes, ``hres check`` runs a named suite.

Exit codes: 0 every check passed, 1 a check failed or was inconclusive,
2 usage error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .big_complex import build_F
from .chain import ChainComplex
from .exact_arith import DEFAULT_PRIME, GF, GradingProfile, default_du, specialize
from .generic_data import GenericData, build_generic, make_specialization
from .groebner import GroebnerBudgetExceeded, ideal_codimension
from .minimal_complex import build_minimal, build_n2, minimal_to_json
from .tor_algebra import (
    build_gamma, chain_square_residual, hilbert_of_presentation, pure_chain_residuals, tor1_square,
)
from .verify import (
    CheckReport, betti_table, certify_exactness, check_d_squared, decomposition_reports,
    expected_betti, iso_reports, koszul_reports, minimal_complex_reports,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
MAX_SYMBOLIC_N = 5
CHECKS = ("d2", "decomposition", "chainmaps", "betti", "minimality", "duality", "h0",
          "exactness", "grade", "isos", "tor")
SPEC_KINDS = {"generic": None, "diagonal": "diagonal", "random": "random-point", "block": "block"}


class UsageError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 3
    d_u: int | None = None
    prime: int = DEFAULT_PRIME
    seed: int = 0
    complex: str = "M"
    specialization: str = "generic"
    check: str | None = None
    out: str | None = None
    json: bool = False
    trials: int = 5
    budget: int = 100_000

    def validate(self) -> "RunConfig":
        if self.n < 2:
            raise UsageError("--n must be at least 2")
        if self.n > MAX_SYMBOLIC_N:
            raise BudgetExceeded(f"symbolic construction is guarded at n <= {MAX_SYMBOLIC_N}")
        if self.d_u is None:
            self.d_u = default_du(self.n)
        try:
            GradingProfile(self.n, self.d_u)
            GF(self.prime)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if self.complex not in ("F", "M"):
            raise UsageError("--complex must be F or M")
        if self.specialization not in SPEC_KINDS:
            raise UsageError(f"unknown specialization {self.specialization!r}")
        if self.command == "check" and self.check not in CHECKS:
            raise UsageError(f"unknown check {self.check!r}")
        if self.trials < 1:
            raise UsageError("--trials must be positive")
        return self


# ---------------------------------------------------------------------------
# helpers


def _specialize_complex(C: ChainComplex, cfg: RunConfig) -> ChainComplex:
    kind = SPEC_KINDS[cfg.specialization]
    if kind is None:
        return C
    params = {"p": cfg.prime} if kind == "random-point" else {}
    s = make_specialization(kind, cfg.n, params, cfg.seed, C.ring)
    target = C.ring.with_domain(GF(cfg.prime)) if kind == "random-point" else C.ring
    return C.map_entries(lambda f: specialize(f, s, target), target)


def _data(cfg: RunConfig) -> GenericData:
    return build_generic(cfg.n, cfg.d_u)


def _fail(cid: str, what: str, **details) -> CheckReport:
    return CheckReport(cid, "fail", {"degree": None, "row": None, "col": None, "poly": what}, 0.0, details)


def _bool_report(cid: str, ok: bool, what: str, **details) -> CheckReport:
    return CheckReport(cid, "pass", None, 0.0, details) if ok else _fail(cid, what, **details)


# ---------------------------------------------------------------------------
# commands


def cmd_build(cfg: RunConfig) -> dict:
    d = _data(cfg)
    if cfg.complex == "F":
        C = _specialize_complex(build_F(d), cfg)
        return C.to_json()
    if cfg.n == 2:
        mc, kb = build_n2(d)
    else:
        mc, kb = build_minimal(d), None
    if cfg.specialization == "generic":
        return minimal_to_json(mc, kb)
    return _specialize_complex(mc.M, cfg).to_json()


def _reports_by_id(reports, ids) -> list:
    return [r for r in reports if r.check_id in ids]


def cmd_check(cfg: RunConfig) -> list[CheckReport]:
    name = cfg.check
    d = _data(cfg)
    n = cfg.n
    if name == "d2":
        if cfg.complex == "F":
            C = build_F(d)
        else:
            C = build_minimal(d).M
        return [check_d_squared(_specialize_complex(C, cfg), f"{cfg.complex}.d_squared")]
    if name == "grade":
        kind = SPEC_KINDS[cfg.specialization]
        from .generic_data import apply_specialization, h_ideal
        if kind not in (None, "diagonal", "block"):
            raise UsageError("grade supports the generic, diagonal and block specializations")
        dd = d if kind is None else apply_specialization(d, make_specialization(kind, n, ring=d.ring))
        try:
            codim, gb = ideal_codimension(h_ideal(dd), cfg.prime, cfg.budget)
        except GroebnerBudgetExceeded as exc:
            raise BudgetExceeded(str(exc)) from exc
        return [_bool_report("grade", codim == 2 * n, f"codimension {codim}, expected {2 * n}",
                             codim=codim, expected=2 * n, basis_size=len(gb.polys), steps=gb.steps)]
    if name == "isos":
        return iso_reports(d, cfg.seed, 5, cfg.prime)
    mc = build_minimal(d)
    if name == "decomposition":
        return _reports_by_id(decomposition_reports(mc, cfg.prime, cfg.seed),
                              {"decomposition.projectors", "tau.left_inverse", "tau.right_inverse",
                               "tau.image_in_N", "N.homotopy"})
    if name == "chainmaps":
        out = _reports_by_id(decomposition_reports(mc, cfg.prime, cfg.seed),
                             {"M.d_squared", "psi.chain_map", "rho.chain_map", "psi_rho.identity", "psi.kernel"})
        if n == 2:
            out += koszul_reports(*build_n2(d))
        return out
    if name == "minimality":
        return _reports_by_id(decomposition_reports(mc, cfg.prime, cfg.seed), {"M.minimal"})
    if name == "betti":
        table = betti_table(mc)
        exp = expected_betti(n, cfg.d_u)
        diff = table.diff(exp)
        return [_bool_report("betti.expected", not diff, f"first difference {diff[:1]}",
                             table=table.to_json())]
    if name == "duality":
        return _reports_by_id(minimal_complex_reports(mc), {"betti.duality", "M.back_span"})
    if name == "h0":
        if n == 2:
            raise UsageError("the h0 span check applies for n >= 3")
        return _reports_by_id(minimal_complex_reports(mc), {"M.h0_span"})
    if name == "exactness":
        C = _specialize_complex(mc.M, cfg) if cfg.specialization != "random" else mc.M
        cert = certify_exactness(C, cfg.prime, cfg.seed, cfg.trials)
        if cert.valid:
            return [CheckReport("exactness", "pass", None, 0.0, cert.to_json())]
        if cert.status == "invalid":
            return [_fail("exactness", "d^2 != 0 at a sample point", **cert.to_json())]
        return [CheckReport("exactness", "inconclusive", None, 0.0, cert.to_json())]
    if name == "tor":
        if n < 3:
            raise UsageError("the Tor suite applies for n >= 3")
        out = []
        g2 = build_gamma(mc, 2)
        res = chain_square_residual(mc, g2, mc.rho[1])
        out.append(_bool_report("tor.chain_square", res == 0, f"residual {res}", residual=res))
        pure = pure_chain_residuals(mc)
        bad = {f"{k[0]}:{k[1]}": v for k, v in pure.items() if v}
        out.append(_bool_report("tor.pure_chain_square", not bad, f"residuals {bad}"))
        sq = tor1_square(mc)
        out.append(_bool_report("tor.square_kernel", sq.matches, "kernel differs from the presentation",
                                **sq.to_json()))
        hil = hilbert_of_presentation(n)
        out.append(_bool_report("tor.degree2", hil[2] == sq.rank and hil[1] == sq.dim_tor1,
                                f"presentation {hil[:3]} vs rank {sq.rank}", hilbert=hil))
        return out
    raise UsageError(f"unknown check {name!r}")


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3)
    common.add_argument("--du", type=int, default=None, dest="d_u")
    common.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--complex", choices=("F", "M"), default="M")
    common.add_argument("--specialization", choices=tuple(SPEC_KINDS), default="generic")
    common.add_argument("--out", default=None)
    common.add_argument("--json", action="store_true")
    common.add_argument("--trials", type=int, default=5)
    common.add_argument("--budget", type=int, default=100_000)
    p = argparse.ArgumentParser(prog="hres", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="export F or M as JSON")
    c = sub.add_parser("check", parents=[common], help="run a named check suite")
    c.add_argument("check", choices=CHECKS)
    return p


def _emit(payload, cfg: RunConfig) -> None:
    text = json.dumps(payload, sort_keys=True, indent=1)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    if cfg.json or (cfg.command == "build" and not cfg.out):
        print(text)


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    cfg = RunConfig(**{k: v for k, v in vars(args).items()})
    try:
        cfg.validate()
        if cfg.command == "build":
            payload = cmd_build(cfg)
            _emit(payload, cfg)
            if not cfg.json and cfg.out:
                ranks = [m["rank"] for m in payload["modules"]]
                print(f"wrote {cfg.out}: ranks {ranks}")
            return EXIT_PASS
        reports = cmd_check(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit([r.to_json() for r in reports], cfg)
    if not cfg.json:
        for r in reports:
            extra = "" if r.ok else f"  {r.witness}"
            print(f"{r.check_id}: {r.status}{extra}")
    return EXIT_PASS if reports and all(r.ok for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["RunConfig", "cmd_build", "cmd_check", "main"]
