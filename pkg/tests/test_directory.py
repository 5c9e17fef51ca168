import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import edge_list, oracle_path_length, oracle_reachability, random_directory
from webdir.directory import Category, WebDirectory, new_directory
from webdir.errors import (
    DuplicateUrl,
    ParallelEdge,
    RootNonSemantic,
    SelfLoop,
    TreeEdgeShadow,
    UnknownParent,
    Unreachable,
)


def test_new_directory_is_root_only():
    wd = new_directory()
    assert wd.category_count == 1
    assert wd.depth == 1
    assert wd.cross_links == []
    assert wd.root_category.level == 1
    assert wd.root_category.resources == []


def test_add_category_levels_and_depth():
    wd = new_directory()
    c = wd.add_category(wd.root, "/a")
    assert wd[c].level == 2
    assert wd[wd.root].children == [c]
    d = wd.add_category(c, "/a/b")
    assert wd[d].level == 3 and wd.depth == 3


def test_add_category_errors():
    wd = new_directory()
    with pytest.raises(UnknownParent):
        wd.add_category(99, "/x")
    wd.add_category(1, "/x")
    with pytest.raises(DuplicateUrl):
        wd.add_category(1, "/x")


def test_sample_shape(sample):
    assert sample.category_count == 6
    assert sample.depth == 4
    assert sample.cross_links == [(6, 5), (3, 2)]
    assert sample.validate() == []


def test_cross_link_rules(sample):
    wd = sample.copy()
    with pytest.raises(SelfLoop):
        wd.add_cross_link(4, 4)
    with pytest.raises(ParallelEdge):
        wd.add_cross_link(6, 5)
    with pytest.raises(TreeEdgeShadow):
        wd.add_cross_link(2, 4)
    with pytest.raises(TreeEdgeShadow):
        wd.add_cross_link(4, 2)
    wd.add_cross_link(5, 6)  # reverse direction is a distinct link
    assert wd.validate() == []


def test_cross_links_are_directed_by_default(sample):
    assert sample.is_step(6, 5)
    assert not sample.is_step(5, 6)
    # 5 -> 6 goes up to 3, across 3 -> 2, then down: 5, 3, 2, 4, 6
    assert sample.shortest_path_length(5, 6) == 5
    assert sample.shortest_path_length(6, 5) == 2


def test_undirected_cross_link_option():
    wd = new_directory(cross_links_directed=False)
    a = wd.add_category(1, "/a")
    b = wd.add_category(1, "/b")
    a2 = wd.add_category(a, "/a/x")
    wd.add_cross_link(a2, b)
    assert wd.shortest_path_length(b, a2) == 2


def test_shortest_path_basics(detour):
    wd, _ = detour
    assert wd.shortest_path_length(3, 3) == 1
    assert wd.shortest_path_length(1, 3) == 3
    assert wd.shortest_path(1, 3) == [1, 2, 3]


def test_shortest_path_unreachable_reported():
    cats = [Category(1, 1, "/", None, []), Category(2, 2, "/lost", None, [])]
    wd = WebDirectory.from_records(cats, [])
    with pytest.raises(Unreachable):
        wd.shortest_path_length(1, 2)


@pytest.mark.parametrize("seed", range(10))
def test_shortest_path_matches_bfs_oracle(seed):
    rng = np.random.default_rng(seed)
    wd = random_directory(rng, 10)
    edges = edge_list(wd)
    for a in wd.categories:
        for b in wd.categories:
            assert wd.shortest_path_length(a, b) == oracle_path_length(edges, a, b)


def test_validate_bad_level():
    cats = [Category(1, 1, "/", None, [2]), Category(2, 3, "/a", 1, [])]
    kinds = [v.kind for v in WebDirectory.from_records(cats, []).validate()]
    assert kinds == ["BadLevel"]


def test_validate_disjoint_component():
    cats = [Category(1, 1, "/", None, [2]), Category(2, 2, "/a", 1, []),
            Category(3, 1, "/island", None, [4]), Category(4, 2, "/island/b", 3, [])]
    kinds = [v.kind for v in WebDirectory.from_records(cats, []).validate()]
    assert kinds == ["DisjointComponent"]


def test_validate_orphan_duplicate_url_and_links():
    cats = [Category(1, 1, "/", None, [2]), Category(2, 2, "/a", 1, []),
            Category(3, 2, "/a", 9, [])]
    found = {v.kind for v in WebDirectory.from_records(cats, [(2, 2), (1, 2)]).validate()}
    assert {"Orphan", "DuplicateUrl", "SelfLoop", "TreeEdgeShadow"} <= found


def test_validate_duplicate_resource():
    cats = [Category(1, 1, "/", None, [2], ["r"]), Category(2, 2, "/a", 1, [], ["r"])]
    assert [v.kind for v in WebDirectory.from_records(cats, []).validate()] == ["DuplicateResource"]


def _alphabet_fixture():
    wd = new_directory()
    fruit = wd.add_category(1, "/fruit")
    letters = {}
    for letter in "ABC":
        letters[letter] = wd.add_category(fruit, f"/fruit/{letter}", non_semantic=True)
    names = {"A": "apples", "B": "bananas", "C": "citrus"}
    leaves = {l: wd.add_category(letters[l], f"/fruit/{l}/{n}") for l, n in names.items()}
    wd.add_resource(leaves["A"], "apple-site")
    other = wd.add_category(1, "/veg")
    wd.add_cross_link(other, letters["B"])
    return wd, fruit, letters, leaves, other


def test_contract_identity_without_flags(sample):
    out = sample.contract_non_semantic_levels()
    assert out == sample and out is not sample


def test_contract_alphabet_layer():
    wd, fruit, letters, leaves, other = _alphabet_fixture()
    before = wd.copy()
    out = wd.contract_non_semantic_levels()
    assert wd == before  # original untouched
    assert out[fruit].children == [leaves["A"], leaves["B"], leaves["C"]]
    assert all(out[c].level == 3 for c in leaves.values())
    assert out.depth == wd.depth - 1
    assert not any(c in out for c in letters.values())
    assert out.cross_links == [(other, fruit)]
    assert out.validate() == []


def test_contract_root_flag_rejected():
    wd = new_directory()
    wd.root_category.non_semantic = True
    with pytest.raises(RootNonSemantic):
        wd.contract_non_semantic_levels()


def test_contract_preserves_reachability_and_ancestry():
    wd, *_ = _alphabet_fixture()
    out = wd.contract_non_semantic_levels()
    keep = sorted(out.categories)
    before = oracle_reachability(edge_list(wd), keep)
    after = oracle_reachability(edge_list(out), keep)
    assert before == after
    for c in keep:
        assert [a for a in wd.ancestors(c) if a in out] == out.ancestors(c)


@st.composite
def op_sequences(draw):
    return draw(st.lists(st.tuples(st.sampled_from(["cat", "link"]), st.integers(0, 10 ** 6),
                                   st.integers(0, 10 ** 6)), max_size=40))


@settings(max_examples=150, deadline=None)
@given(op_sequences())
def test_successful_ops_keep_directory_valid(ops):
    wd = new_directory()
    for op, x, y in ops:
        ids = sorted(wd.categories)
        a, b = ids[x % len(ids)], ids[y % len(ids)]
        try:
            if op == "cat":
                wd.add_category(a, f"/c{wd.next_id}")
            else:
                wd.add_cross_link(a, b)
        except (SelfLoop, ParallelEdge, TreeEdgeShadow):
            pass
    assert wd.validate() == []
    # tree edges span the categories
    tree_edges = sum(len(c.children) for c in wd.categories.values())
    assert tree_edges == wd.category_count - 1
    for c in wd.categories.values():
        assert c.level == 1 + len(wd.ancestors(c.id))
    assert wd.depth == max(c.level for c in wd.categories.values())


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2 ** 32 - 1))
def test_tree_only_paths_are_symmetric(n, seed):
    wd = random_directory(np.random.default_rng(seed), n, n_links=0)
    ids = sorted(wd.categories)
    for a in ids:
        for b in ids:
            assert wd.shortest_path_length(a, b) == wd.shortest_path_length(b, a)
