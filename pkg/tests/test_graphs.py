import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sg2v.errors import BoundsError, EmptyDatasetError, FormatError
from sg2v.graphs import (
    Graph,
    GraphDataset,
    degree_relabel,
    load_jsonl,
    load_tu_dataset,
    neighbors,
    permute_graph,
    write_jsonl,
)

from conftest import write_tu


class TestTuLoader:
    def test_two_graph_example(self, tmp_path):
        # nodes {1,2} -> graph 1, {3} -> graph 2, one edge "1, 2"
        d = write_tu(tmp_path, "mini", [1, 1, 2], [(1, 2)], [0, 1], [5, 6, 7])
        ds = load_tu_dataset(d, "mini")
        assert len(ds) == 2
        p2, isolated = ds.graphs
        assert p2.num_nodes == 2 and p2.edges == frozenset({(0, 1)})
        assert p2.node_labels == {0: "5", 1: "6"}
        assert isolated.num_nodes == 1 and not isolated.edges
        assert isolated.node_labels == {0: "7"}
        assert ds.class_alphabet == ("0", "1")

    def test_single_node_graph(self, tmp_path):
        d = write_tu(tmp_path, "one", [1], [], [2], [3])
        ds = load_tu_dataset(d, "one")
        assert len(ds) == 1
        assert ds.graphs[0].node_labels == {0: "3"}

    def test_edges_deduplicated_and_symmetrized(self, tmp_path):
        d = write_tu(tmp_path, "dup", [1, 1], [(1, 2), (2, 1), (1, 2)], [0], [1, 1])
        ds = load_tu_dataset(d, "dup")
        assert ds.graphs[0].edges == frozenset({(0, 1)})

    def test_missing_node_labels_triggers_degree_relabel(self, tmp_path):
        d = write_tu(tmp_path, "nolab", [1, 1, 1], [(1, 2), (2, 3)], [0])
        ds = load_tu_dataset(d, "nolab")
        assert ds.graphs[0].node_labels == {0: "1", 1: "2", 2: "1"}

    def test_missing_mandatory_file(self, tmp_path):
        d = tmp_path / "broken"
        d.mkdir()
        (d / "broken_A.txt").write_text("")
        with pytest.raises(FormatError, match="graph_indicator"):
            load_tu_dataset(str(d), "broken")

    def test_edge_to_unknown_node_reports_line(self, tmp_path):
        d = write_tu(tmp_path, "bad", [1, 1], [(1, 2), (1, 9)], [0], [1, 1])
        with pytest.raises(FormatError, match=r"_A\.txt:2"):
            load_tu_dataset(d, "bad")

    def test_cross_graph_edge_rejected(self, tmp_path):
        d = write_tu(tmp_path, "cross", [1, 2], [(1, 2)], [0, 1], [1, 1])
        with pytest.raises(FormatError, match="different graphs"):
            load_tu_dataset(d, "cross")

    def test_empty_dataset(self, tmp_path):
        d = write_tu(tmp_path, "empty", [], [], [])
        with pytest.raises(EmptyDatasetError):
            load_tu_dataset(d, "empty")

    def test_deterministic_reload(self, tmp_path):
        d = write_tu(tmp_path, "det", [1, 1, 2, 2], [(1, 2), (3, 4)], [0, 1], [1, 2, 3, 4])
        assert load_tu_dataset(d, "det") == load_tu_dataset(d, "det")

    def test_directed_flag_keeps_direction(self, tmp_path):
        d = write_tu(tmp_path, "digr", [1, 1], [(1, 2)], [0], [1, 1])
        ds = load_tu_dataset(d, "digr", directed=True)
        g = ds.graphs[0]
        assert g.edges == frozenset({(0, 1)})
        assert g.neighbors(0) == [1] and g.neighbors(1) == []


class TestJsonl:
    def test_p3_fixture_line(self, tmp_path):
        path = tmp_path / "p3.jsonl"
        path.write_text('{"edges":[[0,1],[1,2]],"node_labels":["A","B","A"],"class":"+1"}\n')
        ds = load_jsonl(str(path))
        g = ds.graphs[0]
        assert g.num_nodes == 3
        assert g.edges == frozenset({(0, 1), (1, 2)})
        assert g.node_labels == {0: "A", 1: "B", 2: "A"}
        assert g.class_label == "+1"

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(EmptyDatasetError):
            load_jsonl(str(path))

    def test_two_identical_lines_get_distinct_ids(self, tmp_path):
        line = '{"edges":[[0,1]],"node_labels":["A","A"]}\n'
        path = tmp_path / "two.jsonl"
        path.write_text(line * 2)
        ds = load_jsonl(str(path))
        assert [g.graph_id for g in ds.graphs] == [0, 1]
        assert ds.graphs[0].edges == ds.graphs[1].edges

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"edges":[],"node_labels":["A"]}\n{nope}\n')
        with pytest.raises(FormatError, match=":2"):
            load_jsonl(str(path))

    def test_edge_out_of_range(self, tmp_path):
        path = tmp_path / "oob.jsonl"
        path.write_text('{"edges":[[0,5]],"node_labels":["A","B"]}\n')
        with pytest.raises(FormatError, match="unknown node"):
            load_jsonl(str(path))

    def test_round_trip(self, tmp_path, p3):
        second = Graph(1, 4, frozenset({(0, 1), (2, 3)}), {0: "x", 1: "y", 2: "x", 3: "x"})
        ds = GraphDataset.from_graphs("rt", [p3, second])
        out = tmp_path / "rt.jsonl"
        write_jsonl(ds, str(out))
        again = load_jsonl(str(out), name="rt")
        assert again == ds

    def test_round_trip_with_classes(self, tmp_path):
        g = Graph(0, 2, frozenset({(0, 1)}), {0: "x", 1: "y"}, class_label="pos")
        ds = GraphDataset.from_graphs("c", [g])
        out = tmp_path / "c.jsonl"
        write_jsonl(ds, str(out))
        assert load_jsonl(str(out), name="c") == ds


class TestDegreeRelabel:
    def test_isolated_node(self, single_node_a):
        assert degree_relabel(single_node_a).node_labels == {0: "0"}

    def test_p3(self, p3):
        assert degree_relabel(p3).node_labels == {0: "1", 1: "2", 2: "1"}

    def test_triangle(self):
        tri = Graph(0, 3, frozenset({(0, 1), (1, 2), (0, 2)}), {i: "x" for i in range(3)})
        assert set(degree_relabel(tri).node_labels.values()) == {"2"}

    def test_self_loop_counts_twice(self):
        g = Graph(0, 2, frozenset({(0, 0), (0, 1)}), {0: "x", 1: "x"})
        relabeled = degree_relabel(g)
        assert relabeled.node_labels == {0: "3", 1: "1"}
        total = sum(int(lab) for lab in relabeled.node_labels.values())
        assert total == 2 * len(g.edges)

    @given(st.integers(2, 8), st.data())
    @settings(max_examples=30, deadline=None)
    def test_degree_sum_is_twice_edge_count(self, n, data):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = data.draw(st.sets(st.sampled_from(pairs)))
        g = Graph(0, n, frozenset(chosen), {i: "x" for i in range(n)})
        relabeled = degree_relabel(g)
        assert sum(int(x) for x in relabeled.node_labels.values()) == 2 * len(chosen)


class TestNeighbors:
    def test_p3(self, p3):
        assert neighbors(p3, 1) == [0, 2]
        assert neighbors(p3, 0) == [1]

    def test_isolated(self, single_node_a):
        assert neighbors(single_node_a, 0) == []

    def test_out_of_range(self, p3):
        with pytest.raises(BoundsError):
            neighbors(p3, 3)
        with pytest.raises(BoundsError):
            neighbors(p3, -1)


def test_permute_graph_preserves_structure(p3):
    g = permute_graph(p3, [2, 0, 1])
    assert g.num_nodes == 3
    assert sorted(g.node_labels.values()) == ["A", "A", "B"]
    # node 0 (old b) keeps its two neighbors
    assert len(g.neighbors(0)) == 2


class TestBenchmarkStatistics:
    def test_mutag_statistics(self, mutag_dir):
        ds = load_tu_dataset(mutag_dir, "MUTAG")
        assert len(ds) == 188
        assert len(ds.label_alphabet) == 7
        mean_nodes = sum(g.num_nodes for g in ds.graphs) / len(ds)
        assert abs(mean_nodes - 17.9) < 0.1

    def test_ptc_statistics(self, ptc_dir):
        ds = load_tu_dataset(ptc_dir, "PTC")
        assert len(ds) == 344
        assert len(ds.label_alphabet) == 19
        mean_nodes = sum(g.num_nodes for g in ds.graphs) / len(ds)
        assert abs(mean_nodes - 25.5) < 0.2
