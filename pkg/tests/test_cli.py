"""
Testes da linha de comando (willmore4/cli).
"""
import argparse
import json

import pytest

from willmore4.cli import _box, _scan_radii, build_parser, execute


def _ler(path):
    return json.loads(path.read_text(encoding="utf-8"))


# ── Parser ───────────────────────────────────────────────────────────────

class TestParser:
    def test_caixa(self):
        assert _box("2:6,-,1:3,-") == [(2, 6), None, (1, 3), None]

    @pytest.mark.parametrize("raw", ["2:6,-,-", "2-6,-,-,-", "a:b,-,-,-"])
    def test_caixa_invalida(self, raw):
        with pytest.raises(argparse.ArgumentTypeError):
            _box(raw)

    def test_subcomando_obrigatorio(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([])
        assert exc.value.code == 2

    def test_flag_invalida(self):
        with pytest.raises(SystemExit) as exc:
            execute(["energy", "--fd-order", "3"])
        assert exc.value.code == 2

    def test_padroes(self):
        args = build_parser().parse_args(["convergence"])
        assert args.shape == "torus4"
        assert args.grids == (8, 12, 16)
        assert args.p == 4.0

    def test_razoes_do_scan_na_esfera_unitaria(self):
        r1, r2 = _scan_radii(2.0)
        assert r1 ** 2 + r2 ** 2 == pytest.approx(1.0)
        assert r2 / r1 == pytest.approx(2.0)


# ── Comandos ─────────────────────────────────────────────────────────────

class TestCommands:
    def test_energy_toro_meio(self, tmp_path, capsys):
        out = tmp_path / "e.json"
        code = execute(["energy", "--shape", "torus4", "--radii", ".5,.5,.5,.5", "--grid", "8", "--out", str(out)])
        assert code == 0
        assert "E = " in capsys.readouterr().out
        doc = _ler(out)
        assert doc["command"] == "energy"
        assert doc["passed"] is True
        assert doc["reports"][0]["values"]["radii_sq_sum"] == pytest.approx(1.0)
        assert doc["argv"][0] == "energy"

    def test_residual_plano(self, tmp_path):
        out = tmp_path / "r.json"
        assert execute(["residual", "--shape", "flat", "--grid", "8", "--out", str(out)]) == 0
        rep = _ler(out)["reports"][0]
        assert rep["residuals"]["linf"] == 0.0

    def test_forma_desconhecida_sai_com_dois(self):
        assert execute(["energy", "--shape", "klein"]) == 2

    def test_tolerancia_impossivel_sai_com_um(self, tmp_path):
        out = tmp_path / "r.json"
        code = execute(["residual", "--shape", "torus4", "--radii", ".6,.4,.5,.3", "--grid", "8",
                        "--tol", "1e-300", "--out", str(out)])
        assert code == 1
        assert _ler(out)["passed"] is False

    def test_identidades_por_id(self, tmp_path):
        out = tmp_path / "i.json"
        code = execute(["identities", "--shape", "flat", "--grid", "8", "--grid2", "10",
                        "--id", "codazzi", "--id", "lemma_A3", "--out", str(out)])
        assert code == 0
        assert [r["name"] for r in _ler(out)["reports"]] == ["codazzi", "lemma_A3"]

    def test_identidades_por_manifesto(self, tmp_path):
        manifesto = tmp_path / "suite.txt"
        manifesto.write_text("# suite minima\ncodazzi flat 8,10 none 4 -\n", encoding="utf-8")
        out = tmp_path / "m.json"
        assert execute(["identities", "--manifest", str(manifesto), "--out", str(out)]) == 0
        rep = _ler(out)["reports"][0]
        assert rep["values"]["manifest"]["line"] == 2

    def test_manifesto_invalido_sai_com_dois(self, tmp_path):
        manifesto = tmp_path / "suite.txt"
        manifesto.write_text("codazzi flat 8,10 none\n", encoding="utf-8")
        assert execute(["identities", "--manifest", str(manifesto)]) == 2

    def test_caixa_na_margem_sai_com_dois(self):
        code = execute(["flux", "--shape", "sphere4", "--grid", "8", "--gamma-rho", "0.5",
                        "--box", "0:3,-,-,-"])
        assert code == 2

    def test_fluxo_escreve_traco(self, tmp_path):
        out = tmp_path / "f.json"
        code = execute(["flow", "--shape", "torus4", "--radii", ".6,.4,.5,.3", "--grid", "8",
                        "--steps", "2", "--out", str(out)])
        assert code == 0
        linhas = out.with_suffix(".csv").read_text(encoding="utf-8").splitlines()
        assert linhas[0] == "step,energy,residual_linf,min_det_g,dt"
        assert len(linhas) == 4
        assert len(_ler(out)["reports"][0]["values"]["trace"]) == 3

    def test_fluxo_em_forma_limitada_sai_com_dois(self):
        assert execute(["flow", "--shape", "sphere4", "--grid", "8", "--steps", "1"]) == 2

    def test_arquivo_de_forma(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = torus4\nradii = .5,.5,.5,.5\ngrid = 8\n", encoding="utf-8")
        out = tmp_path / "e.json"
        assert execute(["energy", "--shape-file", str(forma), "--out", str(out)]) == 0
        assert _ler(out)["reports"][0]["grid"]["dims"] == [8, 8, 8, 8]

    def test_arquivo_de_forma_com_n_por_eixo(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = torus4\nradii = .5,.5,.5,.5\ngrid = 8,8,8,10\n", encoding="utf-8")
        out = tmp_path / "e.json"
        assert execute(["energy", "--shape-file", str(forma), "--out", str(out)]) == 0
        assert _ler(out)["reports"][0]["grid"]["dims"] == [8, 8, 8, 10]

    def test_grid_na_linha_de_comando_vence_o_arquivo(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = torus4\nradii = .5,.5,.5,.5\ngrid = 8,8,8,10\n", encoding="utf-8")
        out = tmp_path / "e.json"
        assert execute(["energy", "--shape-file", str(forma), "--grid", "6", "--out", str(out)]) == 0
        assert _ler(out)["reports"][0]["grid"]["dims"] == [6, 6, 6, 6]

    def test_margem_do_arquivo_nos_eixos_limitados(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = sphere4\ngrid = 8\nmargin = 6\n", encoding="utf-8")
        out = tmp_path / "e.json"
        assert execute(["energy", "--shape-file", str(forma), "--out", str(out)]) in (0, 1)
        grade = _ler(out)["reports"][0]["grid"]
        assert grade["interior_margin"] == 6
        assert grade["dims"] == [20, 20, 20, 8]

    def test_margem_menor_que_a_exigida_sai_com_dois(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = sphere4\ngrid = 8\nmargin = 1\n", encoding="utf-8")
        assert execute(["energy", "--shape-file", str(forma)]) == 2

    def test_n_por_eixo_em_comando_de_varias_resolucoes_sai_com_dois(self, tmp_path):
        forma = tmp_path / "forma.txt"
        forma.write_text("kind = torus4\nradii = .5,.5,.5,.5\ngrid = 8,8,8,10\n", encoding="utf-8")
        assert execute(["convergence", "--shape-file", str(forma), "--grids", "8,12"]) == 2
