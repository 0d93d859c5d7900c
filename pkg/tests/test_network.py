import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ohmtrace import (
    BaryTree,
    BirthDeath,
    DuplicateEdge,
    EmptyInterior,
    Exhaustion,
    Lattice,
    Network,
    NetworkIOError,
    NonPositiveConductance,
    ParseError,
    RootDisconnected,
    SelfLoop,
    UnknownVertex,
    Wedge,
    ball_network,
    build_finite,
    collapse_boundary,
    load_network,
    make_family,
    random_network,
    save_network,
)
from ohmtrace.network import check_family_symmetry, format_network, parse_network

from strategies import edge_lists


def test_path_pi(path3):
    net = build_finite(path3, 0)
    assert net.pi_of(1) == 2.0
    assert net.pi_of(0) == 1.0
    assert net.num_vertices == 3 and net.num_edges == 2


def test_single_edge_pi():
    net = build_finite([(0, 1, 2.0)], 0)
    assert net.pi_of(0) == net.pi_of(1) == 2.0


def test_disconnected_root_rejected():
    with pytest.raises(RootDisconnected):
        build_finite([(0, 1, 1.0), (2, 3, 1.0)], 0)


@pytest.mark.parametrize("edges, err", [
    ([(0, 1, 0.0)], NonPositiveConductance),
    ([(0, 1, -1.0)], NonPositiveConductance),
    ([(0, 1, float("inf"))], NonPositiveConductance),
    ([(0, 0, 1.0), (0, 1, 1.0)], SelfLoop),
    ([(0, 1, 1.0), (1, 0, 2.0)], DuplicateEdge),
])
def test_invalid_edges(edges, err):
    with pytest.raises(err):
        build_finite(edges, 0)


def test_root_must_be_present():
    with pytest.raises(RootDisconnected):
        build_finite([(0, 1, 1.0)], 7)


def test_lookup_and_symmetry(square):
    net = build_finite(square, 0)
    assert net.conductance(0, 1) == net.conductance(1, 0) == 1.0
    assert net.conductance(0, 2) == 0.0
    assert sorted(y for y, _ in net.neighbors(0)) == [1, 3]
    assert net.transition_probabilities(0) == {1: 0.5, 3: 0.5}
    with pytest.raises(UnknownVertex):
        net.index(9)
    assert 2 in net and 9 not in net


@given(edge_lists())
def test_handshake(edges):
    net = build_finite(edges, 0)
    assert net.pi.sum() == pytest.approx(2 * net.conductances.sum(), rel=1e-12)


@given(edge_lists())
def test_laplacian_rows_sum_to_zero(edges):
    L = build_finite(edges, 0).laplacian().toarray()
    assert np.allclose(L.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(L, L.T)


def test_random_network_connected(rng):
    for n in (2, 5, 12):
        net = random_network(n, rng)
        assert net.num_vertices == n and net.root == 0
        assert (net.conductances >= 0.1).all() and (net.conductances <= 10).all()


# -- files -------------------------------------------------------------------


def test_roundtrip(tmp_path, path3):
    net = build_finite(path3, 0)
    p = tmp_path / "path.txt"
    save_network(net, p)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# ohmtrace-network v1 root=0")
    assert len(lines) == 3
    assert load_network(p) == net


@given(edge_lists())
def test_roundtrip_exact(edges):
    net = build_finite(edges, 0)
    back = parse_network(format_network(net))
    assert back == net
    assert np.array_equal(back.conductances, net.conductances)


@pytest.mark.parametrize("body, line", [
    ("0 1 0\n", 2),
    ("0 1 1.0\n1 0 2.0\n", 3),
    ("0 1\n", 2),
    ("0 x 1\n", 2),
    ("1 1 1\n", 2),
])
def test_parse_errors(body, line):
    with pytest.raises(ParseError) as exc:
        parse_network("# ohmtrace-network v1 root=0\n" + body)
    assert exc.value.lineno == line
    assert f"line {line}" in str(exc.value)


def test_parse_missing_header():
    with pytest.raises(ParseError):
        parse_network("0 1 1.0\n")


def test_load_missing_file(tmp_path):
    with pytest.raises(NetworkIOError):
        load_network(tmp_path / "nope.txt")


# -- families ----------------------------------------------------------------


def test_binary_tree_radius_1():
    net, z = collapse_boundary(Exhaustion(BaryTree(2), 1))
    assert net.num_vertices == 4
    assert net.conductance(0, 1) == net.conductance(0, 2) == 1.0
    assert net.conductance(1, z) == net.conductance(2, z) == 2.0
    assert net.degree(0) == 2


def test_lattice1_radius_2():
    net, z = collapse_boundary(Exhaustion(Lattice(1), 2))
    labels = {net.label(i): i for i in range(z)}
    assert set(labels) == {(-2,), (-1,), (0,), (1,), (2,)}
    assert net.conductance(labels[(2,)], z) == 1.0
    assert net.conductance(labels[(-2,)], z) == 1.0
    assert net.degree(z) == 2
    assert net.num_edges == 6


def test_birth_death_radius_3():
    net, z = collapse_boundary(Exhaustion(BirthDeath("geometric", 2.0), 3))
    assert z == 4
    assert [net.conductance(k, k + 1) for k in range(3)] == [1.0, 2.0, 4.0]
    assert net.conductance(3, z) == 8.0
    assert net.num_edges == 4


def test_radius_zero_rejected():
    with pytest.raises(EmptyInterior):
        collapse_boundary(Exhaustion(BaryTree(2), 0))


@pytest.mark.parametrize("spec, cls", [
    ("lattice(3)", Lattice), ("tree", BaryTree), ("b-ary-tree(3)", BaryTree),
    ("wedge", Wedge), ("birth-death(power)", BirthDeath), ("bd", BirthDeath),
])
def test_make_family(spec, cls):
    assert isinstance(make_family(spec), cls)


def test_make_family_params():
    assert make_family("lattice", {"d": "2"}) == Lattice(2)
    assert make_family("wedge", {"exponent": 0.5}).exponent == 0.5
    with pytest.raises(ValueError):
        make_family("moebius(2)")


FAMILIES = [Lattice(1), Lattice(2), Lattice(3), BaryTree(2), BaryTree(3), Wedge(),
            BirthDeath("geometric", 2.0), BirthDeath("power", exponent=1.5)]


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.describe())
def test_neighbor_rule_symmetry(fam):
    # 100 vertices from a random walk on the family
    rng = np.random.default_rng(7)
    x, seen = fam.root, []
    while len(seen) < 100:
        nb = fam.neighbors(x)
        x = nb[int(rng.integers(len(nb)))][0]
        seen.append(x)
    assert check_family_symmetry(fam, seen) == []


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.describe())
def test_exhaustion_consistency(fam):
    """The radius-n collapse agrees with the radius-(n+1) collapse off the sink."""
    for n in (1, 2, 3):
        small, zs = collapse_boundary(Exhaustion(fam, n))
        big, zb = collapse_boundary(Exhaustion(fam, n + 1))
        lab_s = [small.label(i) for i in range(zs)] if small.labels else list(range(zs))
        lab_b = [big.label(i) for i in range(zb)] if big.labels else list(range(zb))
        where = {lab: i for i, lab in enumerate(lab_b)}
        assert set(lab_s) <= set(where)
        for x, y, c in small.edges():
            if y == zs:
                continue
            assert big.conductance(where[lab_s[x]], where[lab_s[y]]) == c


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.describe())
def test_balls_increase_and_distances(fam):
    prev = None
    for r in (1, 2, 3, 4):
        net = ball_network(fam, r)
        labs = set(net.labels) if net.labels is not None else set(net.vertices.tolist())
        if prev is not None:
            assert prev <= labs
        prev = labs
        if net.labels is not None:
            assert max(fam.distance(x) for x in labs) == r


def test_lattice_ball_sizes():
    # |{x in Z^3 : |x|_1 <= r}| = (2r+1)(2r^2+2r+3)/3
    for r in (1, 2, 5):
        assert ball_network(Lattice(3), r).num_vertices == (2 * r + 1) * (2 * r * r + 2 * r + 3) // 3


def test_tree_ball_matches_generic():
    fam = BaryTree(3)
    fast = fam.ball(4)
    slow = super(BaryTree, fam).ball(4)
    assert fast.size == slow.size
    a = sorted(zip(fast.u.tolist(), fast.v.tolist(), fast.c.tolist()))
    b = sorted(zip(slow.u.tolist(), slow.v.tolist(), slow.c.tolist()))
    assert a == b
    assert fast.boundary_index.tolist() == slow.boundary_index.tolist()
    assert fast.boundary_c.tolist() == slow.boundary_c.tolist()


def test_wedge_profile():
    w = Wedge()
    assert [w.profile(x) for x in (0, 1, 2, 8, 9, 27)] == [0, 1, 2, 2, 3, 3]
    assert w.contains((8, -5, 2)) and not w.contains((8, 0, 3)) and not w.contains((-1, 0, 0))


@given(edge_lists(min_n=3))
def test_induced_keeps_root_component(edges):
    net = build_finite(edges, 0)
    keep = np.ones(net.num_vertices, dtype=bool)
    keep[-1] = False
    sub = net.induced(keep, root_component=True)
    assert net.vertices[-1] not in sub
    assert sub.root == 0


def test_network_is_immutable(path3):
    net = build_finite(path3, 0)
    with pytest.raises(ValueError):
        net.conductances[0] = 5.0
    assert isinstance(net, Network)
