#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <bdarma/errors.hpp>
#include <bdarma/rng.hpp>
#include <bdarma/threading.hpp>

using namespace bdarma;
using Catch::Approx;

TEST_CASE("seed finalizer matches the published reference sequence") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
    CHECK(splitmix64(1) == 0x910a2dec89025cc1ull);
}

TEST_CASE("streams replay from the seed alone") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // children derive from the construction seed, not consumption state
    Rng fresh(42);
    const std::uint64_t early = fresh.child(7).seed();
    for (int i = 0; i < 50; ++i) fresh.next_u64();
    CHECK(fresh.child(7).seed() == early);
    CHECK(fresh.seed() == 42);
}

TEST_CASE("hierarchical splitting separates work items") {
    const Rng root(9);
    CHECK(root.child("rep", 3).seed() == root.child("rep").child(3).seed());
    CHECK(root.child("fit", "bayes").seed() == root.child("fit").child("bayes").seed());
    CHECK(root.child(1, 2).seed() == root.child(1).child(2).seed());

    CHECK(root.child("sim").seed() != root.child("bayes").seed());
    CHECK(root.child(0).seed() != root.child(1).seed());
    CHECK(root.child("rep", 0).seed() != root.child("rep", 1).seed());
    CHECK(root.child("a").child("b").seed() != root.child("b").child("a").seed());

    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < 200; ++r) seeds.push_back(root.child("rep", r).seed());
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("variate generators have the right moments") {
    Rng rng(123);
    const int n = 60000;

    double su = 0, su2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        su += u;
        su2 += u * u;
    }
    CHECK(su / n == Approx(0.5).margin(0.01));
    CHECK(su2 / n - 0.25 == Approx(1.0 / 12).margin(0.01));

    double sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(sn / n == Approx(0.0).margin(0.02));
    CHECK(sn2 / n == Approx(1.0).margin(0.03));

    double se = 0;
    for (int i = 0; i < n; ++i) se += rng.exponential();
    CHECK(se / n == Approx(1.0).margin(0.02));

    for (const double shape : {0.4, 1.0, 3.5}) {
        double sg = 0, sg2 = 0;
        for (int i = 0; i < n; ++i) {
            const double g = rng.gamma(shape);
            CHECK(g > 0.0);
            sg += g;
            sg2 += g * g;
        }
        CHECK(sg / n == Approx(shape).epsilon(0.05));
        CHECK(sg2 / n - (sg / n) * (sg / n) == Approx(shape).epsilon(0.10));
    }

    std::vector<int> counts(7, 0);
    for (int i = 0; i < 14000; ++i) ++counts[rng.uniform_index(7)];
    for (int k = 0; k < 7; ++k) CHECK(counts[k] == Approx(2000).margin(250));

    CHECK(rng.uniform(2.0, 5.0) >= 2.0);
    CHECK(rng.uniform(2.0, 5.0) < 5.0);
}

TEST_CASE("indexed parallel maps are schedule independent") {
    auto run = [](int threads) {
        std::vector<double> out(64);
        parallel_for_indexed(64, threads, [&](int i) {
            Rng r = Rng(5).child("slot", static_cast<std::uint64_t>(i));
            double acc = 0;
            for (int k = 0; k <= i % 7; ++k) acc += r.normal();
            out[i] = acc;
        });
        return out;
    };
    const auto serial = run(1);
    CHECK(run(4) == serial);
    CHECK(run(3) == serial);

    CHECK_THROWS_AS(parallel_for_indexed(8, 2,
                                         [](int i) {
                                             if (i == 3) throw data_error("boom");
                                         }),
                    data_error);
}
