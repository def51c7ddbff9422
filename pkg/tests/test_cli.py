"""End-to-end command-line behavior on small fixture files."""
from __future__ import annotations

import pytest

from termharmony.cli import main
from termharmony.ratesvc import RatingService, ServiceConfig
from termharmony.termbase import load_entry_corpus, load_rating_dataset

from conftest import two_rater_pairs

CORPUS_TEXT = (
    "id\tterms\tdefinition\tsource\n"
    "1\trisk\tcombination of likelihood and severity\tsrcA\n"
    "2\thazard\tpotential source of harm\tsrcA\n"
    "3\tseverity\tmagnitude of harm\tsrcB\n"
    "4\trisk\tlikelihood of harm occurrence\tsrcB\n"
)

VECTORS_TEXT = "\n".join([
    "risk 1.0 0.2",
    "combination 0.1 0.9",
    "of 0.5 0.5",
    "likelihood 0.7 0.1",
    "and 0.4 0.6",
    "severity 0.2 1.0",
    "hazard 0.9 0.3",
    "potential 0.3 0.3",
    "source 0.6 0.2",
    "harm 0.8 0.8",
    "magnitude 0.1 0.4",
    "occurrence 0.2 0.6",
]) + "\n"


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "corpus.tsv").write_text(CORPUS_TEXT, encoding="utf-8")
    (tmp_path / "toy.vec").write_text(VECTORS_TEXT, encoding="utf-8")
    (tmp_path / "freq.txt").write_text(
        "of 1000\nand 900\nrisk 50\nharm 40\nhazard 30\nseverity 20\n"
        "likelihood 10\ncombination 5\npotential 5\nsource 5\nmagnitude 5\n",
        encoding="utf-8")
    dataset = (
        "pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating\n"
        "q1\t1\t2\tdataset\t\tu1\t3\n"
        "q1\t1\t2\tdataset\t\tu2\t4\n"
        "q2\t1\t3\tdataset\t\tu1\t2\n"
        "q2\t1\t3\tdataset\t\tu2\t2\n"
        "q3\t2\t3\tdataset\t\tu1\t1\n"
        "q3\t2\t3\tdataset\t\tu2\t0\n"
        "q4\t1\t4\tdataset\t\tu1\t4\n"
        "q4\t1\t4\tdataset\t\tu2\t4\n"
    )
    (tmp_path / "dataset.tsv").write_text(dataset, encoding="utf-8")
    return tmp_path


def _parse_matrix(text: str) -> dict[str, list[float]]:
    rows = {}
    for line in text.strip().splitlines():
        parts = line.split(" ")
        rows[parts[0]] = [float(x) for x in parts[1:]]
    return rows


class TestEmbed:
    def test_huge_a_matches_plain_averaging(self, workspace, capsys):
        assert main([
            "embed", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--probs", str(workspace / "freq.txt"),
            "--a", "1e9", "--pcr", "0"]) == 0
        weighted = _parse_matrix(capsys.readouterr().out)
        assert main([
            "embed", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--probs", "uniform", "--pcr", "0"]) == 0
        plain = _parse_matrix(capsys.readouterr().out)
        for entry_id, row in plain.items():
            for got, want in zip(weighted[entry_id], row):
                assert got == pytest.approx(want, rel=1e-6)

    def test_out_flag_writes_file(self, workspace):
        out = workspace / "matrix.txt"
        assert main([
            "embed", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--out", str(out)]) == 0
        assert out.exists()
        assert len(_parse_matrix(out.read_text(encoding="utf-8"))) == 4

    def test_byte_identical_reruns(self, workspace, capsys):
        argv = ["embed", "--corpus", str(workspace / "corpus.tsv"),
                "--vectors", str(workspace / "toy.vec"),
                "--probs", str(workspace / "freq.txt"), "--a", "1e-3", "--pcr", "1"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first


class TestRank:
    def test_duplicate_terms_are_suppressed(self, workspace, capsys):
        assert main([
            "rank", "2", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"), "--top-k", "3"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()[1:]
        listed = [line.split("\t")[1] for line in lines]
        # entries 1 and 4 share the term "risk": only one of them may appear
        assert not ({"1", "4"} <= set(listed))

    def test_unknown_entry_is_data_error(self, workspace, capsys):
        assert main([
            "rank", "nope", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec")]) == 1
        assert capsys.readouterr().err.startswith("error: ")


class TestEvaluateAndSweep:
    def test_evaluate_prints_result_row(self, workspace, capsys):
        assert main([
            "evaluate", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--dataset", str(workspace / "dataset.tsv"),
            "--probs", "entries", "--a", "1e-3"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("a\td_pcr")
        assert len(lines) == 2

    def test_sweep_row_count_is_grid_size(self, workspace, capsys):
        assert main([
            "sweep", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--dataset", str(workspace / "dataset.tsv"),
            "--probs", "uniform", "--probs", f"freq={workspace / 'freq.txt'}",
            "--grid", "a=1e-4,1e-3,1e-2;pcr=0,1"]) == 0
        out = capsys.readouterr().out
        all_section = out.split("# all grid points")[1].strip().splitlines()
        rows = [line for line in all_section[1:] if line and not line.startswith("#")]
        # 3 a-values x 2 pcr x 2 sources x 3 token inputs
        assert len(rows) == 3 * 2 * 2 * 3

    def test_evaluate_from_config_file(self, workspace, capsys):
        config = workspace / "run.conf"
        config.write_text(
            f"corpus_path = {workspace / 'corpus.tsv'}\n"
            f"vectors_path = {workspace / 'toy.vec'}\n"
            f"dataset_path = {workspace / 'dataset.tsv'}\n"
            "a = 1e-4\n"
            "d_pcr = 1\n"
            "prob_source = entries\n"
            "token_input = definitions\n",
            encoding="utf-8")
        assert main(["evaluate", "--config", str(config)]) == 0
        row = capsys.readouterr().out.strip().splitlines()[1].split("\t")
        assert row[0] == "0.0001"
        assert row[1] == "1"
        assert row[3] == "definitions"

    def test_flags_override_config_file(self, workspace, capsys):
        config = workspace / "run.conf"
        config.write_text(
            f"corpus_path = {workspace / 'corpus.tsv'}\n"
            f"vectors_path = {workspace / 'toy.vec'}\n"
            f"dataset_path = {workspace / 'dataset.tsv'}\n"
            "d_pcr = 1\n", encoding="utf-8")
        assert main(["evaluate", "--config", str(config), "--pcr", "0"]) == 0
        row = capsys.readouterr().out.strip().splitlines()[1].split("\t")
        assert row[1] == "0"

    def test_unknown_grid_axis_rejected(self, workspace, capsys):
        assert main([
            "sweep", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--dataset", str(workspace / "dataset.tsv"),
            "--grid", "zoom=1"]) == 1
        assert "unknown grid axes" in capsys.readouterr().err


class TestAgreement:
    def test_two_rater_reconstruction(self, tmp_path, capsys):
        lines = ["pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating"]
        for index, (a, b) in enumerate(two_rater_pairs(), start=1):
            base = f"p{index:03d}\tL{index}\tR{index}\tdataset\t"
            lines.append(base + f"\tu12\t{a}")
            lines.append(base + f"\tu13\t{b}")
        path = tmp_path / "ratings.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        assert main(["agreement", "--ratings", str(path)]) == 0
        out = capsys.readouterr().out
        alpha = float(out.splitlines()[0].split("\t")[1])
        assert alpha == pytest.approx(0.78, abs=0.01)
        assert "abs_difference\tpairs" in out
        histogram_lines = out.split("abs_difference\tpairs\n")[1].strip().splitlines()
        assert histogram_lines == ["0\t82", "1\t62", "2\t6", "3\t2", "4\t0"]


class TestAssessRaters:
    def test_synthetic_exclusion(self, tmp_path, capsys):
        from test_ratestats import synthetic_six_raters
        dataset, control_results, outlier = synthetic_six_raters()

        lines = ["pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating"]
        for pair in dataset.pairs:
            for (pair_id, rater), value in dataset.ratings.items():
                if pair_id == pair.pair_id:
                    lines.append(
                        f"{pair.pair_id}\t{pair.left_id}\t{pair.right_id}"
                        f"\tdataset\t\t{rater}\t{value}")
        ratings_path = tmp_path / "ratings.tsv"
        ratings_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        control_lines = ["pair_id\tleft_id\tright_id\tkind\tintended_rating\trater_id\trating"]
        for (rater, pair), value in control_results.items():
            control_lines.append(
                f"{pair.pair_id}\t{pair.left_id}\t{pair.right_id}"
                f"\tcontrol\t{pair.intended_rating}\t{rater}\t{value}")
        controls_path = tmp_path / "controls.tsv"
        controls_path.write_text("\n".join(control_lines) + "\n", encoding="utf-8")

        assert main(["assess-raters", "--ratings", str(ratings_path),
                     "--controls", str(controls_path)]) == 0
        out = capsys.readouterr().out
        excluded_rows = [line for line in out.splitlines()
                         if line.endswith("\tyes")]
        assert len(excluded_rows) == 1
        assert excluded_rows[0].startswith(outlier)
        assert f"excluding {outlier}" in out


class TestThresholdsAndCandidates:
    def test_thresholds_output(self, workspace, capsys):
        assert main([
            "thresholds", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--dataset", str(workspace / "dataset.tsv"),
            "--cutoff", "0.9"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("cutoff\t0.9")
        assert "population_fraction" in out
        assert "category\tcaptured\ttotal" in out

    def test_candidates_output(self, workspace, capsys):
        assert main([
            "candidates", "--corpus", str(workspace / "corpus.tsv"),
            "--vectors", str(workspace / "toy.vec"),
            "--doublette-cutoff", "0.8"]) == 0
        out = capsys.readouterr().out
        assert "provisional" in out
        assert "section\tleft_id\tright_id" in out


class TestServeExport:
    def test_export_from_event_log(self, tmp_path, capsys):
        corpus_path = tmp_path / "corpus.tsv"
        corpus_path.write_text(
            "a\talpha\tfirst definition\ts\n"
            "b\tbeta\tsecond definition\ts\n"
            "c\tgamma\tthird definition\ts\n"
            "w1\tword one\tgloss one\tdict\n"
            "w2\tword two\tgloss two\tdict\n",
            encoding="utf-8")
        dataset_path = tmp_path / "pairs.tsv"
        dataset_path.write_text(
            "d1\ta\tb\tdataset\t\t\t\nd2\tb\tc\tdataset\t\t\t\n", encoding="utf-8")
        controls_path = tmp_path / "controls.tsv"
        controls_path.write_text("c1\tw1\tw2\tcontrol\t4\t\t\n", encoding="utf-8")

        corpus = load_entry_corpus(corpus_path)
        config = ServiceConfig(
            codes=frozenset({"invite"}),
            corpus=corpus,
            dataset_pairs=tuple(load_rating_dataset(dataset_path, corpus).pairs),
            control_pairs=tuple(load_rating_dataset(controls_path, corpus).pairs),
            seed=1,
        )
        log = tmp_path / "events.jsonl"
        service = RatingService(config, log)
        rater = service.register("invite")
        service.confirm_instructions(rater)
        while True:
            item = service.next_item(rater)
            if item is None:
                break
            service.submit_rating(rater, item["pair_id"], 2)
        service.close()

        out_dir = tmp_path / "exported"
        assert main([
            "export", "--corpus", str(corpus_path),
            "--dataset", str(dataset_path), "--controls", str(controls_path),
            "--db", str(log), "--out", str(out_dir)]) == 0
        capsys.readouterr()
        ratings = (out_dir / "ratings.tsv").read_text(encoding="utf-8")
        controls = (out_dir / "control_performance.tsv").read_text(encoding="utf-8")
        assert len(ratings.rstrip().splitlines()) == 1 + 2
        assert len(controls.rstrip().splitlines()) == 1 + 1
        # the exported dataset file loads back as a valid rating dataset
        exported = tmp_path / "roundtrip.tsv"
        exported.write_text(ratings, encoding="utf-8")
        reloaded = load_rating_dataset(exported, corpus)
        assert len(reloaded.pairs) == 2


class TestExitCodes:
    def test_usage_error_is_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main(["embed", "--bogus-flag"])
        assert err.value.code == 2

    def test_unknown_command_is_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main(["transmogrify"])
        assert err.value.code == 2

    def test_data_error_is_exit_1_with_error_line(self, tmp_path, capsys):
        missing = tmp_path / "missing.tsv"
        assert main(["agreement", "--ratings", str(missing)]) == 1
        assert capsys.readouterr().err.startswith("error: ")
