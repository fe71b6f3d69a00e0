#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "gaussnet/graph.hpp"

using namespace gaussnet;

namespace {

std::string write_temp(const std::string& content) {
    static int counter = 0;
    std::string path = "test_graph_tmp_" + std::to_string(counter++) + ".edges";
    std::ofstream out(path);
    out << content;
    return path;
}

Graph karate() { return load_edge_list(std::string(GAUSSNET_DATA_DIR) + "/karate.edges"); }

// Brute-force triangle count through each node.
std::vector<long> triangle_oracle(const Graph& g) {
    std::vector<long> tri(g.n, 0);
    for (int a = 0; a < g.n; ++a)
        for (int b = a + 1; b < g.n; ++b)
            for (int c = b + 1; c < g.n; ++c)
                if (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) {
                    ++tri[a];
                    ++tri[b];
                    ++tri[c];
                }
    return tri;
}

}  // namespace

TEST_CASE("laplacian structure") {
    Graph pair(2, {{0, 1}});
    Eigen::MatrixXd l = laplacian(pair);
    CHECK(l(0, 0) == 1.0);
    CHECK(l(0, 1) == -1.0);

    Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    Eigen::MatrixXd lt = laplacian(tri);
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lt).eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(ev(2) == doctest::Approx(3.0).epsilon(1e-12));

    Graph empty(4, {});
    CHECK(laplacian(empty).cwiseAbs().maxCoeff() == 0.0);

    // Row sums vanish; lowest eigenvector is uniform on connected graphs.
    Graph g = erdos_renyi(20, 0.3, 99);
    Eigen::MatrixXd lg = laplacian(g);
    CHECK(lg.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("component count matches eigenvalue multiplicity") {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 50; ++it) {
        Graph g = erdos_renyi(16, 0.12, rng());
        Eigen::VectorXd ev =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(laplacian(g)).eigenvalues();
        int null_dim = 0;
        for (int i = 0; i < ev.size(); ++i)
            if (std::abs(ev(i)) < 1e-8) ++null_dim;
        CHECK(null_dim == g.component_count());
    }
}

TEST_CASE("erdos renyi generator") {
    CHECK(erdos_renyi(30, 1.0, 5).edge_count() == 435);
    CHECK(erdos_renyi(30, 0.0, 5).edge_count() == 0);
    CHECK(erdos_renyi(30, 0.5, 123).edges == erdos_renyi(30, 0.5, 123).edges);
    CHECK(erdos_renyi(30, 0.5, 123).edges != erdos_renyi(30, 0.5, 124).edges);

    // Edge count over seeds within 4 sigma of binomial expectation.
    double total = 0.0;
    const int reps = 100;
    for (int s = 0; s < reps; ++s) total += erdos_renyi(30, 0.5, 1000 + s).edge_count();
    const double mean = total / reps;
    const double sigma = std::sqrt(435 * 0.25 / reps);
    CHECK(std::abs(mean - 217.5) < 4 * sigma);
    CHECK_THROWS_AS(erdos_renyi(10, 1.5, 0), InvalidParameter);
}

TEST_CASE("stochastic block model") {
    auto [g, part] = sbm({10, 10, 10, 10}, 0.75, 0.025, 42);
    CHECK(g.n == 40);
    CHECK(part.community_count() == 4);
    CHECK(part.labels[0] == 0);
    CHECK(part.labels[39] == 3);

    auto [cliques, cp] = sbm({5, 5}, 1.0, 0.0, 7);
    CHECK(cliques.edge_count() == 20);
    CHECK(cliques.component_count() == 2);

    double inter = 0.0;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) {
        auto [gg, pp] = sbm({10, 10}, 0.75, 0.025, 5000 + s);
        for (auto [i, j] : gg.edges)
            if (pp.labels[i] != pp.labels[j]) inter += 1.0;
    }
    CHECK(inter / reps == doctest::Approx(2.5).epsilon(0.2));
}

TEST_CASE("edge list loading") {
    Graph k = karate();
    CHECK(k.n == 34);
    CHECK(k.edge_count() == 78);

    std::string p = write_temp("0 1\n1 2\n");
    Graph path = load_edge_list(p);
    CHECK(path.n == 3);
    CHECK(path.edge_count() == 2);
    std::remove(p.c_str());

    std::string p1 = write_temp("# comment\n1 2\n2 3\n");
    Graph one = load_edge_list(p1, /*one_indexed=*/true);
    CHECK(one.n == 3);
    std::remove(p1.c_str());

    std::string bad = write_temp("0 x\n");
    CHECK_THROWS_AS(load_edge_list(bad), FormatError);
    std::remove(bad.c_str());
    std::string loop = write_temp("1 1\n");
    CHECK_THROWS_AS(load_edge_list(loop), InvalidGraph);
    std::remove(loop.c_str());
    std::string dup = write_temp("0 1\n1 0\n");
    CHECK_THROWS_AS(load_edge_list(dup), InvalidGraph);
    std::remove(dup.c_str());

    std::string rt = write_temp("");
    save_edge_list(k, rt);
    Graph k2 = load_edge_list(rt);
    CHECK(k2.edges == k.edges);
    std::remove(rt.c_str());
}

TEST_CASE("adjective-noun stand-in dataset") {
    Graph a = load_edge_list(std::string(GAUSSNET_DATA_DIR) + "/adjnoun.edges");
    CHECK(a.n == 112);
    CHECK(a.edge_count() == 425);
    CHECK(a.is_connected());
}

TEST_CASE("modularity") {
    Graph k = karate();
    Partition factions = load_partition(std::string(GAUSSNET_DATA_DIR) + "/karate.communities");
    CHECK(modularity(k, factions) == doctest::Approx(0.3582).epsilon(2e-3));

    Partition flat(std::vector<int>(k.n, 0));
    CHECK(modularity(k, flat) == doctest::Approx(0.0).epsilon(1e-12));

    auto [cl, cp] = sbm({5, 5}, 1.0, 0.0, 7);
    CHECK(modularity(cl, cp) == doctest::Approx(0.5).epsilon(1e-12));

    // Invariant under community relabeling.
    std::vector<int> swapped(k.n);
    for (int v = 0; v < k.n; ++v) swapped[v] = 1 - factions.labels[v];
    CHECK(modularity(k, Partition(swapped)) ==
          doctest::Approx(modularity(k, factions)).epsilon(1e-12));

    CHECK_THROWS_AS(modularity(Graph(3, {}), Partition({0, 0, 0})), DegenerateGraph);
}

TEST_CASE("clustering spectrum") {
    Graph k5(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    auto spec = clustering_spectrum(k5);
    CHECK(spec.at(4) == doctest::Approx(1.0).epsilon(1e-12));

    Graph star(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    auto sspec = clustering_spectrum(star);
    CHECK(sspec.at(5) == 0.0);
    CHECK(sspec.at(1) == 0.0);

    // Karate spectrum against a brute-force triangle oracle.
    Graph kg = karate();
    auto deg = kg.degrees();
    auto tri = triangle_oracle(kg);
    std::map<int, std::pair<double, int>> acc;
    for (int v = 0; v < kg.n; ++v) {
        double c = deg[v] >= 2 ? 2.0 * tri[v] / (double(deg[v]) * (deg[v] - 1)) : 0.0;
        acc[deg[v]].first += c;
        acc[deg[v]].second += 1;
    }
    auto spec_k = clustering_spectrum(kg);
    for (auto& [kdeg, s] : acc) {
        double expect = kdeg < 2 ? 0.0 : s.first / s.second;
        CHECK(spec_k.at(kdeg) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("rewiring preserves the right invariants") {
    Graph k = karate();
    auto deg0 = k.degrees();
    auto jdm0 = joint_degree_census(k);

    RewireResult pk = rewire(k, RewireMode::pk, 17);
    CHECK(pk.graph.degrees() == deg0);
    CHECK(pk.graph.edge_count() == k.edge_count());
    CHECK(pk.graph.edges != k.edges);  // actually randomized

    RewireResult pkk = rewire(k, RewireMode::pkk, 18);
    CHECK(pkk.graph.degrees() == deg0);
    CHECK(joint_degree_census(pkk.graph) == jdm0);

    RewireParams params;
    RewireResult pkck = rewire(k, RewireMode::pk_ck, 19, params);
    CHECK(pkck.graph.degrees() == deg0);
    if (pkck.converged) CHECK(pkck.ck_distance <= params.ck_tol);

    RewireResult pkkck = rewire(k, RewireMode::pkk_ck, 20, params);
    CHECK(joint_degree_census(pkkck.graph) == jdm0);
    if (pkkck.converged) CHECK(pkkck.ck_distance <= params.ck_tol);

    // Distance reported by the ck modes matches an independent recomputation.
    const double d = clustering_spectrum_distance(clustering_spectrum(pkck.graph),
                                                  clustering_spectrum(k));
    CHECK(d == doctest::Approx(pkck.ck_distance).epsilon(1e-9));

    // Determinism per seed.
    CHECK(rewire(k, RewireMode::pk, 17).graph.edges == pk.graph.edges);
    CHECK_THROWS_AS(rewire(Graph(3, {{0, 1}}), RewireMode::pk, 1), InvalidGraph);
}

TEST_CASE("partition validation") {
    CHECK_THROWS_AS(Partition({1, 2}), InvalidPartition);
    CHECK_THROWS_AS(Partition({0, 2}), InvalidPartition);
    Partition ok({0, 1, 0, 2});
    CHECK(ok.community_count() == 3);
}
