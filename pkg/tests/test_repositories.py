# Standard library
import io
import json
from pathlib import Path

# Third-party
import polars as pl
import pytest

# Local imports
from stochreach.core.models import RunManifest, StochasticDigraph
from stochreach.core.validation import InputFormatError, ValidationError
from stochreach.repositories import GraphRepository, OutputRepository


@pytest.fixture
def repo() -> GraphRepository:
    return GraphRepository()


def _write(tmp_path: Path, payload: object, name: str = "input.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# -----------------------------
# Stochastic digraphs
# -----------------------------


def test_load_digraph_parses_fractions(
    repo: GraphRepository, four_node_path: Path, four_node: StochasticDigraph
) -> None:
    loaded = repo.load_digraph(four_node_path)
    assert loaded.edge_sets == four_node.edge_sets
    assert loaded.mu == pytest.approx(four_node.mu)


def test_load_digraph_accepts_numbers(repo: GraphRepository, tmp_path: Path) -> None:
    path = _write(tmp_path, {"n": 2, "edge_sets": [[[1, 2], [2, 1]]], "mu": [1]})
    assert repo.load_digraph(path).mu == (1.0,)


def test_missing_file(repo: GraphRepository, tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        repo.load_digraph(tmp_path / "absent.json")


@pytest.mark.parametrize(
    ("payload", "field"),
    [
        ({"edge_sets": [], "mu": []}, "n"),
        ({"n": "four", "edge_sets": [], "mu": []}, "n"),
        ({"n": 2, "edge_sets": [[[1, 2, 3]]], "mu": [1]}, "edge_sets[0]"),
        ({"n": 2, "edge_sets": [[[1, 2]]], "mu": ["x/y"]}, "mu[0]"),
        ({"n": 2, "edge_sets": [[[1, 2]]], "mu": [0.5]}, "mu"),
        ({"n": 2, "edge_sets": [[[1, 3]]], "mu": [1]}, "edge_sets[0]"),
        ({"n": 2, "edge_sets": [[[1, 2]], [[2, 0]]], "mu": [1, 0]}, "edge_sets[1]"),
        ({"n": 0, "edge_sets": [[[1, 1]]], "mu": [1]}, "n"),
        ({"n": 2, "edge_sets": [], "mu": []}, "edge_sets"),
        ({"n": 2, "edge_sets": [[[1, 2]]], "mu": ["1/2", "1/2"]}, "mu"),
        ({"n": 2, "edge_sets": [[[1, 2]]], "mu": [-1]}, "mu"),
        ([1, 2], "<root>"),
    ],
)
def test_malformed_digraph_names_field(
    repo: GraphRepository, tmp_path: Path, payload: object, field: str
) -> None:
    path = _write(tmp_path, payload)
    with pytest.raises(InputFormatError) as info:
        repo.load_digraph(path)
    assert info.value.field == field
    assert str(path) in str(info.value)


def test_invalid_json(repo: GraphRepository, tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(InputFormatError, match="invalid JSON"):
        repo.load_digraph(path)


def test_save_then_load_keeps_graph(
    repo: GraphRepository, tmp_path: Path, four_node: StochasticDigraph
) -> None:
    path = tmp_path / "nested" / "saved.json"
    repo.save_digraph(four_node, path)

    assert json.loads(path.read_text())["mu"] == ["2/3", "1/3"]
    loaded = repo.load_digraph(path)
    assert loaded.edge_sets == four_node.edge_sets
    assert loaded.mu == pytest.approx(four_node.mu)


# -----------------------------
# SIR configurations
# -----------------------------


def test_load_sir(repo: GraphRepository, three_agent_path: Path) -> None:
    cfg, x0 = repo.load_sir(three_agent_path)

    assert (cfg.n_agents, cfg.kappa) == (3, 5)
    assert cfg.alpha == pytest.approx(0.7)
    assert cfg.motion.successors[0] == (2, 3)
    assert [(int(a.sigma), a.pos) for a in x0.agents] == [(2, 1), (1, 1), (1, 2)]


@pytest.mark.parametrize(
    ("change", "field"),
    [
        ({"N": 0}, "N"),
        ({"alpha": 1.5}, "alpha"),
        ({"beta": "half"}, "beta"),
        ({"x0": [[2, 1], [1, 1]]}, "x0"),
        ({"x0": [[2, 1], [1, 1], [1, 9]]}, "x0"),
        ({"x0": [[4, 1], [1, 1], [1, 2]]}, "x0"),
        ({"motion": {"kappa": 5, "edges": [[1, 2]], "directed": True}}, "motion"),
        ({"motion": {"kappa": 5}}, "motion.edges"),
    ],
)
def test_malformed_sir_names_field(
    repo: GraphRepository,
    three_agent_path: Path,
    change: dict[str, object],
    field: str,
) -> None:
    payload = json.loads(three_agent_path.read_text())
    path = _write(three_agent_path.parent, {**payload, **change}, "changed.json")
    with pytest.raises(InputFormatError) as info:
        repo.load_sir(path)
    assert info.value.field == field


# -----------------------------
# Outputs
# -----------------------------


def test_write_frame_to_stdout_and_files(tmp_path: Path) -> None:
    stdout = io.StringIO()
    output = OutputRepository(stdout=stdout)
    frame = pl.DataFrame({"k": [0, 1], "value": ["0", "1/3"]})

    output.write_frame(frame)
    assert stdout.getvalue().splitlines() == ["k,value", "0,0", "1,1/3"]

    output.write_frame(frame, tmp_path / "out" / "table.csv")
    assert pl.read_csv(tmp_path / "out" / "table.csv").height == 2
    output.write_frame(frame, tmp_path / "table.parquet")
    assert pl.read_parquet(tmp_path / "table.parquet").equals(frame)
    output.write_frame(frame, tmp_path / "table.json")
    assert (tmp_path / "table.json").is_file()

    with pytest.raises(ValidationError, match="Unsupported"):
        output.write_frame(frame, tmp_path / "table.xlsx")


def test_write_manifest_to_stderr_or_file(tmp_path: Path) -> None:
    stderr = io.StringIO()
    output = OutputRepository(stderr=stderr)
    manifest = RunManifest(
        subcommand="reach",
        parameters={"horizon": 3},
        input_hashes={},
        seed=None,
        version="0.1.0",
        created_at="2026-01-01T00:00:00+00:00",
        wall_clock_seconds=0.5,
    )

    output.write_manifest(manifest)
    assert json.loads(stderr.getvalue())["rng_algorithm"] == "PCG64"

    path = tmp_path / "run.manifest.json"
    output.write_manifest(manifest, path)
    assert json.loads(path.read_text())["parameters"] == {"horizon": 3}
