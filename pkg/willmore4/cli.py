"""
Linha de comando do willmore4.

    willmore4 energy --shape torus4 --radii .5,.5,.5,.5 --grid 16
    willmore4 residual --shape flat --grid 16
    willmore4 identities --manifest suite.txt --out r.json

Codigos de saida: 0 tudo aprovado, 1 alguma verificacao reprovada (relatorio
escrito mesmo assim), 2 erro de uso ou de entrada.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import __version__
from .config import EngineConfig, VALID_FD_ORDERS, get_engine_config
from .energy.functional import energy_density, total_energy
from .errors import ShapeSpecError, StiffnessLimit, Willmore4Error
from .flow.explicit import run_flow
from .geometry.fields import build_geometry
from .grid.lattice import Grid4, region_values
from .operators.willmore import residual_norms, willmore
from .reporting.report import CheckReport, build_document, dumps_report, timed, write_report, write_trace_csv
from .shapes.catalog import AMBIENT_DIMS, ShapeSpec, margined_grid, sample_jet
from .shapes.oracle import oracle_mean_curvature, oracle_willmore, product_oracle
from .shapes.perturbation import PerturbationSpec
from .shapes.spec_file import load_shape_file
from .verification.identities import (
    GammaParams,
    IdentityId,
    derived_rtol,
    energy_scale_invariance,
    run_identity,
)
from .verification.manifest import load_manifest
from .verification.variation import gradient_check, subdomain_flux_check

logger = logging.getLogger("willmore4.cli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
OPERATOR_DEPTH = 4


# ---------- Conversores de argumentos ----------

def _floats(raw: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de numeros invalida: {raw!r}")


def _ints(raw: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de inteiros invalida: {raw!r}")


def _box(raw: str) -> List[Optional[Tuple[int, int]]]:
    """`lo:hi,lo:hi,-,-` ('-' = eixo inteiro / conjunto interior)."""
    out: List[Optional[Tuple[int, int]]] = []
    for part in raw.split(","):
        part = part.strip()
        if part == "-":
            out.append(None)
            continue
        lo, sep, hi = part.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"faixa invalida {part!r}; use lo:hi ou -")
        try:
            out.append((int(lo), int(hi)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"faixa invalida {part!r}")
    if len(out) != 4:
        raise argparse.ArgumentTypeError(f"caixa precisa de 4 faixas, recebeu {len(out)}")
    return out


# ---------- Parser ----------

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("forma e grade")
    g.add_argument("--shape", default="torus4", help="forma do catalogo (flat, sphere4, torus4, s2xs2, s1xs3, s1xs1xs2)")
    g.add_argument("--shape-file", type=Path, help="arquivo texto de forma (sobrepoe --shape/--radii)")
    g.add_argument("--radii", type=_floats, help="raios separados por virgula")
    g.add_argument("--clamp", type=float, help="delta do clamp polar (radianos)")
    g.add_argument("--grid", type=int, default=None, help="pontos por eixo")
    g.add_argument("--fd-order", type=int, choices=VALID_FD_ORDERS, help="ordem do estencil")
    c = common.add_argument_group("corte / variacao")
    c.add_argument("--gamma-center", type=_floats, help="centro do corte (4 coordenadas)")
    c.add_argument("--gamma-rho", type=float, help="raio do corte")
    c.add_argument("--p", type=float, default=4.0, help="expoente do corte (>= 4)")
    c.add_argument("--amplitude", type=float, default=1e-3, help="amplitude da perturbacao")
    c.add_argument("--direction", default="mean_curvature",
                   help="mean_curvature, vector:a1,...,am ou random (usa --seed)")
    o = common.add_argument_group("execucao")
    o.add_argument("--tol", type=float, help="tolerancia do usuario (substitui a derivada)")
    o.add_argument("--out", type=Path, help="arquivo JSON do relatorio")
    o.add_argument("--seed", type=int, default=0, help="semente para direcoes aleatorias")
    o.add_argument("--threads", type=int, help="tamanho do pool de threads")
    o.add_argument("--log-level", help="nivel de log (DEBUG, INFO, ...)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="willmore4", description="Energia de Willmore 4-D: energia, operador e identidades")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("energy", parents=[common], help="energia e densidade contra a forma fechada")
    sub.add_parser("residual", parents=[common], help="|W - W_forma_fechada| e tabela por parcela")
    sub.add_parser("gradcheck", parents=[common], help="delta_FD contra int B.W")
    flux = sub.add_parser("flux", parents=[common], help="verificacao em subdominio com o fluxo de V")
    flux.add_argument("--box", type=_box, help="caixa de indices lo:hi por eixo, '-' = inteiro")
    ids = sub.add_parser("identities", parents=[common], help="suite de identidades")
    ids.add_argument("--manifest", type=Path, help="manifesto (id forma grade gamma p tol)")
    ids.add_argument("--id", dest="ids", action="append", help="identidade (repetivel); padrao: todas")
    ids.add_argument("--grid2", type=int, help="resolucao fina (padrao: 1.5 x --grid)")
    ids.add_argument("--scale-invariance", action="store_true", help="inclui E(lambda Phi) = E(Phi)")
    flow = sub.add_parser("flow", parents=[common], help="fluxo explicito de demonstracao")
    flow.add_argument("--steps", type=int, default=10)
    flow.add_argument("--dt", type=float, help="passo fixo (padrao: flow_cfl * h^6 / |W|inf)")
    flow.add_argument("--trace", type=Path, help="CSV do traco (padrao: ao lado de --out)")
    conv = sub.add_parser("convergence", parents=[common], help="|W - W_forma_fechada| em varias grades")
    conv.add_argument("--grids", type=_ints, default=(8, 12, 16), help="resolucoes crescentes")
    scan = sub.add_parser("scan", parents=[common], help="residuo de produtos sobre razoes de raios")
    scan.add_argument("--family", choices=("s2xs2", "s1xs3"), default="s2xs2")
    scan.add_argument("--ratios", type=_floats, default=(0.5, 0.75, 1.0, 1.25, 1.5, 2.0), help="r2 / r1")
    return parser


# ---------- Montagem a partir dos argumentos ----------

def effective_config(args: argparse.Namespace) -> EngineConfig:
    cfg = get_engine_config()
    overrides = {}
    if args.fd_order is not None:
        overrides["fd_order"] = args.fd_order
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.log_level:
        overrides["log_level"] = args.log_level.upper()
    if args.clamp is not None:
        overrides["default_clamp"] = args.clamp
    cfg = replace(cfg, **overrides)
    if not cfg.is_valid():
        raise Willmore4Error(f"configuracao invalida: {cfg.to_dict()}")
    return cfg


def resolve_shape(args: argparse.Namespace, cfg: EngineConfig) -> Tuple[ShapeSpec, Optional[int]]:
    """Forma do catalogo e N sugerido.

    Do arquivo de forma ficam em args a perturbacao, o fd_order, os pontos por
    eixo e a margem explicita.
    """
    args.file_perturbation = None
    args.file_fd_order = None
    args.file_grid_dims = None
    args.file_margin = None
    if args.shape_file is not None:
        sf = load_shape_file(args.shape_file)
        args.file_perturbation = sf.perturbation
        args.file_fd_order = sf.fd_order
        args.file_grid_dims = sf.grid_dims
        args.file_margin = sf.margin
        n = sf.grid_dims[0] if sf.grid_dims else None
        return sf.spec, n
    return ShapeSpec(args.shape, args.radii or (), clamp=cfg.default_clamp), None


def resolve_grid(spec: ShapeSpec, n: Union[int, Sequence[int]], cfg: EngineConfig,
                 depth: int = OPERATOR_DEPTH, margin: Optional[int] = None) -> Grid4:
    return margined_grid(spec, n, cfg.fd_order, depth, margin)


def _counts(args: argparse.Namespace, n: int) -> Union[int, Tuple[int, ...]]:
    """Pontos por eixo: os do arquivo de forma quando --grid nao foi dado."""
    return getattr(args, "grid_dims", None) or n


def _uniform_counts(args: argparse.Namespace) -> None:
    dims = getattr(args, "grid_dims", None)
    if dims and len(set(dims)) > 1:
        raise ShapeSpecError(f"{args.command} usa N igual nos quatro eixos; arquivo de forma pede {list(dims)}")


def resolve_direction(args: argparse.Namespace, spec: ShapeSpec) -> str:
    if args.direction != "random":
        return args.direction
    rng = np.random.default_rng(args.seed)
    vec = rng.standard_normal(AMBIENT_DIMS[spec.kind])
    return "vector:" + ",".join("%.17g" % v for v in vec)


def resolve_perturbation(args: argparse.Namespace, spec: ShapeSpec) -> PerturbationSpec:
    from_file = getattr(args, "file_perturbation", None)
    if from_file is not None and args.gamma_rho is None:
        return from_file
    return PerturbationSpec(
        base=spec,
        amplitude=args.amplitude,
        center=args.gamma_center,
        rho=args.gamma_rho,
        direction=resolve_direction(args, spec),
        p=args.p,
    )


def _gamma(args: argparse.Namespace) -> GammaParams:
    return GammaParams(center=args.gamma_center, rho=args.gamma_rho, p=args.p)


def _tolerance(args: argparse.Namespace, derived: float) -> Tuple[float, str]:
    return (args.tol, "user") if args.tol is not None else (derived, "derived")


# ---------- Comandos ----------

def cmd_energy(args, cfg, spec, n) -> List[CheckReport]:
    grid = resolve_grid(spec, _counts(args, n), cfg, depth=1, margin=args.file_margin)
    report = CheckReport("energy", shape=spec.describe(), grid=grid.describe(), config=cfg.to_dict())
    with timed(report):
        jet = sample_jet(spec, grid, cfg.degeneracy_eps)
        geo = build_geometry(jet, cfg)
        density = energy_density(geo).values
        energy = total_energy(geo)
        report.values.update({"energy": energy, "radii_sq_sum": spec.radii_sq_sum * spec.scale ** 2})
        if spec.kind != "flat_patch":
            oracle = product_oracle(spec)
            report.values["oracle"] = oracle.describe()
            dev = float(np.abs(region_values(density, grid) - oracle.density).max())
            report.check("density", dev, 1e-6, "spec")
            if all(grid.periodic):
                report.check("energy_relative", abs(energy - oracle.energy) / abs(oracle.energy), 1e-8, "spec")
        else:
            report.check("energy", abs(energy), 1e-10, "spec")
    print(f"E = {energy:.12g}   sum r_i^2 = {report.values['radii_sq_sum']:.12g}")
    return [report]


def _residual_report(spec: ShapeSpec, grid: Grid4, cfg: EngineConfig, tol: Optional[float]) -> CheckReport:
    report = CheckReport("residual", shape=spec.describe(), grid=grid.describe(), config=cfg.to_dict())
    with timed(report):
        jet = sample_jet(spec, grid, cfg.degeneracy_eps)
        geo = build_geometry(jet, cfg)
        wf = willmore(geo)
        target = oracle_willmore(spec, jet)
        reference = None if spec.kind == "flat_patch" else oracle_mean_curvature(spec, jet)
        norms = residual_norms(wf, geo, reference=reference, target=target)
        scale = max([row["linf"] for row in norms["terms"].values()] + [0.0])
        derived = max(1e-10, derived_rtol(grid, OPERATOR_DEPTH) * scale)
        tolerance, prov = (tol, "user") if tol is not None else (derived, "derived")
        report.check("linf", norms["linf"], tolerance, prov)
        report.record("l2", norms["l2"])
        report.record("tangential_linf", norms["tangential_linf"])
        report.terms = norms["terms"]
        report.values["term_scale"] = scale
    return report


def cmd_residual(args, cfg, spec, n) -> List[CheckReport]:
    report = _residual_report(spec, resolve_grid(spec, _counts(args, n), cfg, margin=args.file_margin), cfg, args.tol)
    print(f"|W - W_ref|inf = {report.residuals['linf']:.6e}")
    return [report]


def cmd_convergence(args, cfg, spec, n) -> List[CheckReport]:
    grids = sorted(set(args.grids))
    if len(grids) < 2:
        raise Willmore4Error("convergence precisa de pelo menos duas resolucoes")
    _uniform_counts(args)
    lattices = [resolve_grid(spec, k, cfg, margin=args.file_margin) for k in grids]
    rows = [_residual_report(spec, g, cfg, args.tol) for g in lattices]
    hs = [g.h_max for g in lattices]
    summary = CheckReport("convergence", shape=spec.describe(), config=cfg.to_dict())
    summary.grid = {"resolutions": grids}
    errs = [r.residuals["linf"] for r in rows]
    for k in range(len(grids) - 1):
        key = f"{grids[k]}->{grids[k + 1]}"
        e1, e2 = errs[k], errs[k + 1]
        if e1 > 1e-10 and e2 > 1e-10:
            summary.orders[key] = math.log(e1 / e2) / math.log(hs[k] / hs[k + 1])
        else:
            summary.orders[key] = math.nan
    last = list(summary.orders.values())[-1]
    if math.isfinite(last):
        summary.check("order_deficit", max(0.0, 2.0 - last), 0.0, "spec")
    summary.values["linf"] = errs
    for k, e in zip(grids, errs):
        print(f"N={k:3d}  |W - W_ref|inf = {e:.6e}")
    return rows + [summary]


def cmd_gradcheck(args, cfg, spec, n) -> List[CheckReport]:
    grid = resolve_grid(spec, _counts(args, n), cfg, margin=args.file_margin)
    report = gradient_check(resolve_perturbation(args, spec), grid, cfg, args.tol)
    print(f"delta_FD = {report.values['delta_fd']:.12e}   int B.W = {report.values['delta_w']:.12e}")
    return [report]


def cmd_flux(args, cfg, spec, n) -> List[CheckReport]:
    grid = resolve_grid(spec, _counts(args, n), cfg, margin=args.file_margin)
    report = subdomain_flux_check(resolve_perturbation(args, spec), grid, args.box, cfg, args.tol)
    v = report.values
    print(f"delta_FD = {v['delta_fd']:.10e}   int B.W = {v['delta_w']:.10e}   fluxo = {v['flux']:.10e}")
    return [report]


def cmd_identities(args, cfg, spec, n) -> List[CheckReport]:
    reports: List[CheckReport] = []
    if args.manifest is not None:
        for row in load_manifest(args.manifest):
            logger.info("manifesto linha %d: %s em %s", row.line_no, row.identity.value, row.shape.kind)
            rep = run_identity(row.identity, row.shape, row.resolutions, cfg.fd_order, row.gamma, row.tolerance, cfg,
                               margin=args.file_margin)
            rep.values["manifest"] = row.describe()
            reports.append(rep)
    else:
        _uniform_counts(args)
        ids = [IdentityId.parse(i) for i in args.ids] if args.ids else list(IdentityId)
        fine = args.grid2 or int(round(1.5 * n))
        for identity in ids:
            reports.append(run_identity(identity, spec, (n, fine), cfg.fd_order, _gamma(args), args.tol, cfg,
                                        margin=args.file_margin))
        if args.scale_invariance:
            reports.append(energy_scale_invariance(spec, n, config=cfg))
    for rep in reports:
        print(f"{rep.name:18s} {'ok' if rep.passed else 'FALHOU'}  residuo={rep.residuals.get('residual', math.nan):.3e}")
    return reports


def cmd_flow(args, cfg, spec, n) -> List[CheckReport]:
    target: Union[ShapeSpec, PerturbationSpec] = spec
    if args.gamma_rho is not None or getattr(args, "file_perturbation", None) is not None:
        target = resolve_perturbation(args, spec)
    report = CheckReport("flow", shape=target.describe(), config=cfg.to_dict())
    rows = []
    with timed(report):
        try:
            trace = run_flow(target, args.steps, args.dt, _counts(args, n), cfg.fd_order, cfg)
            rows = [r.as_tuple() for r in trace.rows]
            report.values.update(trace.describe())
            if trace.final is not None:
                report.grid = trace.final.grid.describe()
            e = trace.energies
            increase = max([b - a for a, b in zip(e, e[1:])] + [0.0])
            report.check("energy_increase", increase, 1e-12 * max(1.0, abs(e[0])), "spec")
            report.check("tangential_drift", max(trace.drift) if trace.drift else 0.0, 1e-6, "spec")
        except StiffnessLimit as exc:
            rows = [r.as_tuple() for r in exc.trace]
            report.values["stopped"] = "stiffness_limit"
            report.notes.append(str(exc))
            report.record("stiffness_limit", 1.0)
    report.values["trace"] = [list(r) for r in rows]
    trace_path = args.trace or (args.out.with_suffix(".csv") if args.out else None)
    if trace_path is not None:
        write_trace_csv(trace_path, rows)
    for r in rows:
        print(f"passo {r[0]:3d}  E = {r[1]:.12e}  dt = {r[4]:.3e}")
    return [report]


def _scan_radii(ratio: float) -> Tuple[float, float]:
    # r1^2 + r2^2 = 1
    r1 = 1.0 / math.sqrt(1.0 + ratio * ratio)
    return r1, ratio * r1


def cmd_scan(args, cfg, spec, n) -> List[CheckReport]:
    report = CheckReport("scan", config=cfg.to_dict())
    report.shape = {"family": args.family, "ratios": list(args.ratios)}
    rows = []
    with timed(report):
        for ratio in args.ratios:
            s = ShapeSpec(args.family, _scan_radii(ratio), clamp=cfg.default_clamp)
            grid = resolve_grid(s, _counts(args, n), cfg, margin=args.file_margin)
            jet = sample_jet(s, grid, cfg.degeneracy_eps)
            geo = build_geometry(jet, cfg)
            W = willmore(geo).W
            oracle = product_oracle(s)
            w_grid = float(np.abs(region_values(W, grid)).max())
            w_err = float(np.abs(region_values(W - oracle_willmore(s, jet), grid)).max())
            rows.append({
                "ratio": ratio,
                "radii": list(s.radii),
                "w_oracle": list(oracle.w),
                "critical": oracle.is_critical,
                "w_grid_linf": w_grid,
                "w_error_linf": w_err,
            })
            print(f"r2/r1={ratio:6.3f}  |W|inf={w_grid:.6e}  oracle w={', '.join('%.6e' % x for x in oracle.w)}")
    report.values["rows"] = rows
    return [report]


COMMANDS: Dict[str, Callable] = {
    "energy": cmd_energy,
    "residual": cmd_residual,
    "gradcheck": cmd_gradcheck,
    "flux": cmd_flux,
    "identities": cmd_identities,
    "flow": cmd_flow,
    "convergence": cmd_convergence,
    "scan": cmd_scan,
}


def execute(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = effective_config(args)
        logging.basicConfig(level=getattr(logging, cfg.log_level, logging.INFO), format=LOG_FORMAT)
        spec, file_n = resolve_shape(args, cfg)
        if args.fd_order is None and args.file_fd_order is not None:
            cfg = replace(cfg, fd_order=args.file_fd_order)
        n = args.grid or file_n or 12
        args.grid_dims = None if args.grid else args.file_grid_dims
        reports = COMMANDS[args.command](args, cfg, spec, n)
    except (Willmore4Error, ValueError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return 2

    document = build_document(args.command, reports, cfg.to_dict(), {"argv": list(argv) if argv is not None else sys.argv[1:]})
    if args.out is not None:
        write_report(args.out, document)
    else:
        logger.debug("relatorio:\n%s", dumps_report(document))
    return 0 if document["passed"] else 1


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
