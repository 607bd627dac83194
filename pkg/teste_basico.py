"""Teste basico do willmore4.

Verifica que cada modulo principal carrega e que os casos de forma fechada
mais baratos batem, em grade pequena. Use:

    python teste_basico.py
"""
import math
import sys


def _check(label: str, fn):
    try:
        fn()
        print(f"  [OK]   {label}")
        return True
    except Exception as e:
        print(f"  [FAIL] {label}: {type(e).__name__}: {e}")
        return False


def main() -> int:
    failures = 0

    # 1. Versao
    print("[1/8] Versao do pacote")
    import willmore4
    print(f"  __version__ = {willmore4.__version__}")

    # 2. Configuracao (sem .env obrigatorio)
    print("\n[2/8] Configuracao")
    def _config():
        from willmore4 import EngineConfig
        cfg = EngineConfig.from_env()
        assert cfg.is_valid(), f"configuracao do ambiente invalida: {cfg.to_dict()}"
        print(f"     -> fd_order={cfg.fd_order}, threads={cfg.threads}")
    failures += not _check("EngineConfig.from_env().is_valid()", _config)

    # 3. Densidade da esfera unitaria
    print("\n[3/8] Densidade da esfera unitaria")
    def _sphere():
        from willmore4 import ShapeSpec, build_geometry, default_grid, energy_density, sample_jet
        from willmore4.grid import region_values
        spec = ShapeSpec("sphere4")
        geo = build_geometry(sample_jet(spec, default_grid(spec, 8)))
        e = region_values(energy_density(geo).values, geo.grid)
        assert abs(e - 3.0).max() < 1e-6, f"densidade max |e-3| = {abs(e - 3.0).max():.3e}"
    failures += not _check("e = 3 na esfera", _sphere)

    # 4. Energia do toro critico
    print("\n[4/8] Energia do toro (1/2, 1/2, 1/2, 1/2)")
    def _energy():
        from willmore4 import ShapeSpec, build_geometry, default_grid, sample_jet, total_energy
        spec = ShapeSpec("torus4", (0.5, 0.5, 0.5, 0.5))
        e = total_energy(build_geometry(sample_jet(spec, default_grid(spec, 8))))
        assert abs(e - 3.0 * math.pi ** 4) < 1e-8 * e, f"E={e}, esperado 3 pi^4"
        print(f"     -> E={e:.12g}")
    failures += not _check("E = 3 pi^4", _energy)

    # 5. Operador no plano
    print("\n[5/8] Operador de Willmore")
    def _flat():
        from willmore4 import ShapeSpec, build_geometry, default_grid, sample_jet, willmore
        spec = ShapeSpec("flat")
        W = willmore(build_geometry(sample_jet(spec, default_grid(spec, 8)))).W
        assert abs(W).max() == 0.0, "W do plano deveria ser zero"
    failures += not _check("W(plano) = 0", _flat)

    # 6. Checagem de gradiente
    print("\n[6/8] Checagem de gradiente")
    def _gradient():
        from willmore4 import PerturbationSpec, ShapeSpec, default_grid, gradient_check
        spec = ShapeSpec("flat")
        pspec = PerturbationSpec(spec, center=(math.pi,) * 4, rho=2.5, direction="vector:0,0,0,0,1")
        rep = gradient_check(pspec, default_grid(spec, 8))
        assert rep.passed, rep.residuals
    failures += not _check("delta_FD = int B . W no plano", _gradient)

    # 7. Identidade pontual
    print("\n[7/8] Suite de identidades")
    def _codazzi():
        from willmore4 import ShapeSpec, run_identity
        rep = run_identity("codazzi", ShapeSpec("torus4", (0.6, 0.4, 0.5, 0.3)), (8, 12))
        assert rep.passed, rep.residuals
    failures += not _check("codazzi no toro nao critico", _codazzi)

    # 8. CLI (so o parser)
    print("\n[8/8] Linha de comando")
    def _parser():
        from willmore4.cli import build_parser
        args = build_parser().parse_args(["energy", "--grid", "8"])
        assert args.command == "energy"
    failures += not _check("build_parser", _parser)

    # Resumo
    print()
    if failures == 0:
        print("Tudo OK. willmore4 v" + willmore4.__version__ + " carregado e funcional.")
        return 0
    print(f"FALHOU: {failures} teste(s) com erro.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
