import csv
import io
import json
import subprocess
import sys

import pytest

from divkmedian import Graph, load_instance, random_metric, save_instance
from divkmedian.cli import BENCH_HEADER, main, minority_bounds


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fig2(tmp_path, capsys):
    p = tmp_path / "fig2.json"
    assert run(["gen", "fig2", "--c", 10, "--out", p], capsys)[0] == 0
    return p


@pytest.fixture
def disjoint2(tmp_path):
    p = tmp_path / "d2.json"
    save_instance(random_metric(40, 2, 5, [1, 1], seed=3), p)
    return p


@pytest.fixture
def three_groups(tmp_path):
    p = tmp_path / "t3.json"
    save_instance(random_metric(30, 3, 6, [2, 2, 2], seed=1), p)
    return p


class TestGen:
    def test_fig2(self, fig2):
        inst = load_instance(fig2)
        assert inst.k == 2 and inst.n_groups == 4 and inst.report.ok

    def test_random_stdout_deterministic(self, capsys):
        argv = ["gen", "random", "--n", 50, "--t", 3, "--k", 6, "--seed", 1]
        a, b = run(argv, capsys)[1], run(argv, capsys)[1]
        assert a == b and json.loads(a)["k"] == 6

    @pytest.mark.parametrize("kind", ["domset", "vertexcover"])
    def test_graph_kinds(self, kind, tmp_path, capsys):
        g = tmp_path / "path3.json"
        g.write_text(json.dumps(Graph.from_edges(3, [(0, 1), (1, 2)]).to_dict()))
        code, out, _ = run(["gen", kind, "--graph", g, "--k", 1], capsys)
        assert code == 0 and json.loads(out)["lower_bounds"][0] == 1

    def test_bad_params(self, capsys):
        code, _, err = run(["gen", "fig2", "--c", 0.5], capsys)
        assert code == 2 and "error" in err
        assert run(["gen", "random", "--n", 5], capsys)[0] == 2
        assert run(["gen", "domset", "--k", 1], capsys)[0] == 2

    def test_round_trip_validates(self, tmp_path, capsys):
        p = tmp_path / "r.json"
        run(["gen", "random", "--n", 20, "--t", 2, "--k", 3, "--lower-bounds", "1,1",
             "--overlap", 0.2, "--out", p], capsys)
        assert load_instance(p).report.violations == []


class TestSolve:
    def test_oracle_fig2(self, fig2, capsys):
        code, out, _ = run(["solve", fig2, "--algo", "oracle"], capsys)
        d = json.loads(out)
        assert code == 0 and d["centers"] == [2, 3] and d["cost"] == 2.0

    def test_ls1_stuck(self, fig2, capsys):
        d = json.loads(run(["solve", fig2, "--algo", "ls1", "--init", "0,1"], capsys)[1])
        assert d["cost"] == 20.0 and d["feasible"] is True

    def test_output_keys(self, fig2, capsys):
        d = json.loads(run(["solve", fig2, "--algo", "ls1"], capsys)[1])
        assert set(d) == {"algo", "centers", "cost", "feasible", "iterations",
                          "per_group_counts", "seed", "seconds"}

    def test_rb_on_three_groups(self, three_groups, capsys):
        assert run(["solve", three_groups, "--algo", "rb"], capsys)[0] == 2

    def test_rb_completion_profile(self, disjoint2, capsys):
        code, out, _ = run(["solve", disjoint2, "--algo", "rb"], capsys)
        d = json.loads(out)
        assert code == 0 and sum(d["profile"]) == 5 and d["feasible"]

    def test_profile_direct(self, disjoint2, capsys):
        code, out, _ = run(["solve", disjoint2, "--algo", "ls1", "--profile-mode", "direct"],
                           capsys)
        assert code == 0 and "profile" not in json.loads(out)

    @pytest.mark.parametrize("algo", ["ls0", "ls1", "ls2", "relaxed", "shrink", "oracle"])
    def test_algorithms_run(self, algo, three_groups, tmp_path, capsys):
        out = tmp_path / "sol.json"
        code, _, _ = run(["solve", three_groups, "--algo", algo, "--restarts", 2, "--out", out],
                         capsys)
        d = json.loads(out.read_text())
        assert code == 0 and len(d["centers"]) == 6 and d["algo"] == algo

    def test_infeasible_exit(self, tmp_path, capsys):
        g = tmp_path / "c4.json"
        g.write_text(json.dumps({"n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}))
        inst = tmp_path / "vc.json"
        run(["gen", "vertexcover", "--graph", g, "--k", 1, "--out", inst], capsys)
        assert run(["solve", inst, "--algo", "ls1"], capsys)[0] == 3
        assert run(["solve", inst, "--algo", "oracle"], capsys)[0] == 3

    def test_refusal_exit(self, tmp_path, capsys):
        p = tmp_path / "big.json"
        save_instance(random_metric(60, 2, 12, seed=0), p)
        code, _, err = run(["solve", p, "--algo", "oracle"], capsys)
        assert code == 4 and "exceeds the cap" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(["solve", tmp_path / "nope.json"], capsys)[0] == 2

    def test_invalid_instance(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"k": 5, "groups": [[0]], "lower_bounds": [1],
                                 "distances": {"matrix": [[1.0, 2.0]]}}))
        assert run(["solve", p], capsys)[0] == 2

    def test_unknown_algo_is_usage(self, fig2, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["solve", str(fig2), "--algo", "magic"])
        assert exc.value.code == 2


class TestBench:
    def parse(self, text):
        return list(csv.DictReader(io.StringIO(text)))

    def test_empty_sweep(self, disjoint2, capsys):
        code, out, _ = run(["bench", disjoint2], capsys)
        assert code == 0 and out == ",".join(BENCH_HEADER) + "\n"

    def test_minority_sweep(self, disjoint2, capsys):
        code, out, _ = run(["bench", disjoint2, "--minority-fractions", "0.2,0.6",
                            "--algos", "ls1,rb", "--restarts", 2, "--no-timing"], capsys)
        rows = self.parse(out)
        assert code == 0 and out.splitlines()[0] == ",".join(BENCH_HEADER)
        assert rows[0]["level"] == "baseline" and rows[0]["pod"] == "0.0"
        assert len(rows) == 1 + 2 * 2 * 3
        mins = [r for r in rows if r["seed"] == "min"]
        assert len(mins) == 4 and all(r["feasible"] == "true" for r in mins)
        for r in rows[1:]:
            assert float(r["l_star"]) == 0.0
            assert float(r["pod"]) >= -0.05  # restart noise only

    def test_minority_bounds_use_ceiling(self):
        assert minority_bounds(2, 5, 1, 0.3) == [0, 2]
        assert minority_bounds(3, 10, 0, 0.3) == [3, 0, 0]
        assert minority_bounds(2, 10, 0, 0.31) == [4, 0]
        assert minority_bounds(2, 4, 1, 0.0) == [0, 0]

    def test_sweep_rows_meet_minority_bound(self, disjoint2, capsys):
        out = run(["bench", disjoint2, "--minority-fractions", "0.3", "--algos", "ls1,ls2",
                   "--restarts", 2, "--no-timing"], capsys)[1]
        assert all(r["l_star"] == "0.0" and r["feasible"] == "true"
                   for r in self.parse(out)[1:])

    def test_unattainable_point_is_a_row(self, disjoint2, capsys):
        code, out, _ = run(["bench", disjoint2, "--minority-fractions", "50", "--algos", "ls1",
                            "--restarts", 1], capsys)
        rows = self.parse(out)
        assert code == 0 and rows[1]["status"] == "infeasible" and rows[1]["cost"] == ""

    def test_lambda_sweep(self, tmp_path, capsys):
        p = tmp_path / "o.json"
        save_instance(random_metric(40, 3, 6, [2, 2, 2], overlap=0.1, seed=2), p)
        code, out, _ = run(["bench", p, "--lambdas", "2,64", "--restarts", 2], capsys)
        rows = self.parse(out)
        assert code == 0 and {r["algo"] for r in rows[1:]} == {"relaxed"}
        assert all(0.0 <= float(r["l_star"]) <= 1.0 for r in rows)

    def test_bad_algo(self, disjoint2, capsys):
        assert run(["bench", disjoint2, "--minority-fractions", "0.5", "--algos", "ls0"],
                   capsys)[0] == 2

    def test_deterministic(self, disjoint2, capsys):
        argv = ["bench", disjoint2, "--minority-fractions", "0.4", "--lambdas", "4",
                "--algos", "ls1,ls2", "--restarts", 2, "--no-timing", "--seed", 5]
        assert run(argv, capsys)[1] == run(argv, capsys)[1]


class TestIngest:
    @pytest.fixture
    def toy(self, tmp_path):
        p = tmp_path / "toy.csv"
        p.write_text("x,y,c1,c2\n1,2,a,u\n2,3,a,v\n5,1,b,u\n0,0,b,v\n")
        return p

    def test_disjoint(self, toy, capsys):
        code, out, err = run(["ingest", toy, "--protected", "c1", "--features", "x,y", "--k", 2],
                             capsys)
        d = json.loads(out)
        assert code == 0 and len(d["groups"]) == 2 and d["k"] == 2
        assert "c1=a" in err and "min=2 max=2" in err

    def test_intersect(self, toy, tmp_path, capsys):
        out = tmp_path / "i.json"
        run(["ingest", toy, "--protected", "c1,c2", "--group-mode", "intersect", "--out", out],
            capsys)
        assert load_instance(out).n_groups == 4

    def test_missing_column(self, toy, capsys):
        code, _, err = run(["ingest", toy, "--protected", "sex"], capsys)
        assert code == 2 and "missing" in err


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "divkmedian.cli", "gen", "fig2", "--c", "3"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["k"] == 2
