#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sovrisk/features.hpp"
#include "sovrisk/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace sovrisk;

namespace {

MonthlySeries dummy_series(std::vector<double> v) {
    std::vector<Cell> c(v.size());
    for (size_t i = 0; i < v.size(); ++i) c[i] = v[i];
    return MonthlySeries("d", {1900, 1}, std::move(c));
}

// Independent sliding-window oracle for cumulative_count.
double brute_count(const std::vector<double>& d, size_t t) {
    if (d[t] == 0.0) return 0.0;
    double n = 1.0;
    for (size_t j = (t >= 11 ? t - 11 : 0); j < t; ++j)
        if (d[j] == 1.0) n += 1.0;
    return n;
}

EventRecord mk_event(std::string id, EventKind k, MonthIndex start, int dur) {
    EventRecord r;
    r.id = std::move(id);
    r.kind = k;
    r.location_class = LocationClass::homeland;
    r.start = start;
    r.duration_months = dur;
    return r;
}

// Frequency response of the computed weights: G(w) = |sum_j w_j e^{-iwj}|.
double filter_gain(const std::vector<double>& w, double omega) {
    int K = (static_cast<int>(w.size()) - 1) / 2;
    std::complex<double> g = 0;
    for (int j = -K; j <= K; ++j)
        g += w[static_cast<size_t>(j + K)] *
             std::exp(std::complex<double>(0, -omega * j));
    return std::abs(g);
}

} // namespace

TEST_CASE("cumulative_count boundary cases") {
    // isolated event month -> 1
    auto c1 = cumulative_count(dummy_series({0, 0, 1, 0}));
    CHECK(*c1.at_index(2) == doctest::Approx(1.0));
    CHECK(*c1.at_index(3) == doctest::Approx(0.0));

    // no events -> all zero
    for (const auto& v : cumulative_count(dummy_series(std::vector<double>(24, 0))).values())
        CHECK(*v == doctest::Approx(0.0));

    // event in current month and all prior 11 -> 12, saturated
    auto c12 = cumulative_count(dummy_series(std::vector<double>(15, 1)));
    CHECK(*c12.at_index(0) == doctest::Approx(1.0));
    CHECK(*c12.at_index(11) == doctest::Approx(12.0));
    CHECK(*c12.at_index(14) == doctest::Approx(12.0));

    CHECK_THROWS_AS(cumulative_count(dummy_series({0, 2, 0})), DataError);
}

TEST_CASE("cumulative_count matches sliding-window brute force on random dummies") {
    Rng rng = make_rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> d(180);
        for (auto& x : d) x = (rng() % 4 == 0) ? 1.0 : 0.0;
        auto c = cumulative_count(dummy_series(d));
        for (size_t t = 0; t < d.size(); ++t) {
            CHECK(*c.at_index(t) == doctest::Approx(brute_count(d, t)));
            CHECK(*c.at_index(t) >= 0.0);
            CHECK(*c.at_index(t) <= 12.0);
            // gated: zero off event months, >= dummy on event months
            CHECK(*c.at_index(t) * (1.0 - d[t]) == doctest::Approx(0.0));
            CHECK(*c.at_index(t) >= d[t]);
        }
    }
}

TEST_CASE("multiple_events_dummy definition and brute force") {
    MonthSpan range{{1905, 1}, {1905, 12}};
    // one collective event only -> 0 throughout
    EventCatalog solo({mk_event("c", EventKind::collective, {1905, 2}, 3)});
    for (const auto& v : multiple_events_dummy(solo, range).values())
        CHECK(*v == doctest::Approx(0.0));

    // collective + successful assassination in the same month -> 1 there
    EventCatalog both({mk_event("c", EventKind::collective, {1905, 2}, 3),
                       mk_event("a", EventKind::successful_assassination, {1905, 3}, 1)});
    auto d = multiple_events_dummy(both, range);
    CHECK(*d.at({1905, 2}) == doctest::Approx(0.0));
    CHECK(*d.at({1905, 3}) == doctest::Approx(1.0));
    CHECK(*d.at({1905, 4}) == doctest::Approx(0.0));

    // random catalogs vs per-month kind-count brute force, and the
    // OR-of-kind-dummies upper bound
    Rng rng = make_rng(31);
    std::uniform_int_distribution<int> month(0, 11), dur(1, 4), kind(0, 3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<EventRecord> recs;
        for (int i = 0; i < 8; ++i)
            recs.push_back(mk_event("e" + std::to_string(i),
                                    static_cast<EventKind>(kind(rng)),
                                    range.first.plus(month(rng)), dur(rng)));
        EventCatalog cat(recs);
        auto md = multiple_events_dummy(cat, range);
        for (int s = range.first.serial(); s <= range.last.serial(); ++s) {
            MonthIndex m = MonthIndex::from_serial(s);
            std::set<EventKind> kinds;
            for (const auto& r : cat.records())
                if (r.active_in(m)) kinds.insert(r.kind);
            CHECK(*md.at(m) == doctest::Approx(kinds.size() >= 2 ? 1.0 : 0.0));
            double any = kinds.empty() ? 0.0 : 1.0;
            CHECK(*md.at(m) <= any);
        }
    }
}

TEST_CASE("interaction_dummy") {
    MonthSpan range{{1905, 1}, {1905, 12}};
    EventFilter focal;
    focal.kind = EventKind::successful_assassination;

    // focal alone -> 0
    EventCatalog alone({mk_event("a", EventKind::successful_assassination, {1905, 5}, 1)});
    for (const auto& v : interaction_dummy(focal, alone, range).values())
        CHECK(*v == doctest::Approx(0.0));

    // focal + external war month -> 1
    EventCatalog war({mk_event("a", EventKind::successful_assassination, {1905, 5}, 1),
                      mk_event("w", EventKind::external, {1905, 4}, 3)});
    auto d = interaction_dummy(focal, war, range);
    CHECK(*d.at({1905, 5}) == doctest::Approx(1.0));
    CHECK(*d.at({1905, 4}) == doctest::Approx(0.0)); // no focal event active

    // randomized vs brute force
    Rng rng = make_rng(41);
    std::uniform_int_distribution<int> month(0, 11), dur(1, 4), kind(0, 3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<EventRecord> recs;
        for (int i = 0; i < 8; ++i)
            recs.push_back(mk_event("e" + std::to_string(i),
                                    static_cast<EventKind>(kind(rng)),
                                    range.first.plus(month(rng)), dur(rng)));
        EventCatalog cat(recs);
        auto id = interaction_dummy(focal, cat, range);
        for (int s = range.first.serial(); s <= range.last.serial(); ++s) {
            MonthIndex m = MonthIndex::from_serial(s);
            bool focal_on = false, other_on = false;
            for (const auto& r : cat.records()) {
                if (!r.active_in(m)) continue;
                if (focal.matches(r)) focal_on = true;
                else if (r.kind != *focal.kind) other_on = true;
            }
            CHECK(*id.at(m) == doctest::Approx(focal_on && other_on ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("versts_to_km") {
    // Reproduces the worked figure: 852.2 versts -> 909.13 km
    CHECK(versts_to_km(852.2) == doctest::Approx(909.13).epsilon(1e-5));
    CHECK(std::fabs(versts_to_km(852.2) - 909.13) < 0.01);
    CHECK(versts_to_km(0.0) == doctest::Approx(0.0));
    CHECK(versts_to_km(1000.0) == doctest::Approx(1066.8));
    CHECK_THROWS_AS(versts_to_km(-1.0), DataError);

    // linearity
    Rng rng = make_rng(3);
    std::uniform_real_distribution<double> u(0, 5000);
    for (int i = 0; i < 50; ++i) {
        double a = u(rng), b = u(rng);
        CHECK(versts_to_km(a + b) ==
              doctest::Approx(versts_to_km(a) + versts_to_km(b)).epsilon(1e-12));
    }
}

TEST_CASE("distance_feature") {
    EventRecord r = mk_event("e", EventKind::collective, {1905, 1}, 1);
    r.distance_km = 909.13;
    CHECK(distance_feature(r, DistanceMode::raw_km) == doctest::Approx(909.13));
    // ln(909.13), frozen from an independent high-precision evaluation
    CHECK(distance_feature(r, DistanceMode::log_km) ==
          doctest::Approx(6.81248809825334).epsilon(1e-12));

    EventRecord one = r;
    one.distance_km = 1.0;
    CHECK(distance_feature(one, DistanceMode::log_km) == doctest::Approx(0.0));

    // versts-only record converts first
    EventRecord v = mk_event("v", EventKind::collective, {1905, 1}, 1);
    v.versts = 852.2;
    CHECK(distance_feature(v, DistanceMode::raw_km) ==
          doctest::Approx(versts_to_km(852.2)));

    EventRecord none = mk_event("n", EventKind::collective, {1905, 1}, 1);
    CHECK_THROWS_AS(distance_feature(none, DistanceMode::raw_km), DataError);
    EventRecord zero = none;
    zero.distance_km = 0.0;
    CHECK_THROWS_AS(distance_feature(zero, DistanceMode::log_km), DataError);
    CHECK(distance_feature(zero, DistanceMode::raw_km) == doctest::Approx(0.0));
}

TEST_CASE("baxter_king weights are symmetric and zero-sum") {
    for (auto [lo, hi, K] : {std::tuple{2, 8, 3}, {6, 32, 12}, {18, 96, 36}}) {
        auto w = baxter_king_weights(lo, hi, K);
        REQUIRE(static_cast<int>(w.size()) == 2 * K + 1);
        double sum = 0;
        for (int j = 0; j <= K; ++j) {
            CHECK(w[static_cast<size_t>(K + j)] ==
                  doctest::Approx(w[static_cast<size_t>(K - j)]).epsilon(1e-15));
        }
        for (double x : w) sum += x;
        CHECK(std::fabs(sum) < 1e-14);
    }
}

TEST_CASE("baxter_king kills constants") {
    MonthlySeries c("c", {1900, 1}, std::vector<Cell>(40, Cell{7.5}));
    auto f = baxter_king(c, 2, 8, 3);
    for (size_t t = 3; t + 3 < f.size(); ++t)
        CHECK(std::fabs(*f.at_index(t)) < 1e-10);
    CHECK_FALSE(f.at_index(0).has_value());
    CHECK_FALSE(f.at_index(f.size() - 1).has_value());
    CHECK_THROWS_AS(baxter_king(MonthlySeries("s", {1900, 1},
                                              std::vector<Cell>(6, Cell{1.0})),
                                2, 8, 3),
                    DataError);
}

TEST_CASE("baxter_king gain: in-band near 1, far out-of-band near 0") {
    // Use a generous truncation so the finite approximation is tight, and
    // verify both the DFT gain of the weights and an actual filtered sine.
    int K = 36, lo = 6, hi = 32;
    auto w = baxter_king_weights(lo, hi, K);
    const double pi = std::numbers::pi;

    double mid_period = 12.0;
    double g_in = filter_gain(w, 2 * pi / mid_period);
    CHECK(g_in == doctest::Approx(1.0).epsilon(0.05));

    double g_short = filter_gain(w, 2 * pi / 2.5); // far above the band
    double g_long = filter_gain(w, 2 * pi / 200.0); // far below the band
    CHECK(g_short < 0.10);
    CHECK(g_long < 0.10);

    // filtered pure sine inside the band keeps its amplitude within 5%
    int n = 400;
    std::vector<Cell> v(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) v[static_cast<size_t>(t)] = std::sin(2 * pi * t / mid_period);
    auto f = baxter_king(MonthlySeries("sine", {1900, 1}, v), lo, hi, K);
    double amp = 0;
    for (size_t t = static_cast<size_t>(K); t + static_cast<size_t>(K) < f.size(); ++t)
        amp = std::max(amp, std::fabs(*f.at_index(t)));
    CHECK(amp == doctest::Approx(1.0).epsilon(0.05));

    // far out-of-band sine is attenuated below 10%
    for (int t = 0; t < n; ++t) v[static_cast<size_t>(t)] = std::sin(2 * pi * t / 2.5);
    auto f2 = baxter_king(MonthlySeries("hf", {1900, 1}, v), lo, hi, K);
    double amp2 = 0;
    for (size_t t = static_cast<size_t>(K); t + static_cast<size_t>(K) < f2.size(); ++t)
        amp2 = std::max(amp2, std::fabs(*f2.at_index(t)));
    CHECK(amp2 < 0.10);
}

TEST_CASE("lag shifts and lead recovers") {
    MonthlySeries s("s", {1900, 1}, {Cell{1.0}, Cell{2.0}, Cell{3.0}});
    auto l1 = lag(s, 1);
    CHECK_FALSE(l1.at_index(0).has_value());
    CHECK(*l1.at_index(1) == doctest::Approx(1.0));
    CHECK(*l1.at_index(2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lag(s, 0), DataError);

    Rng rng = make_rng(8);
    std::normal_distribution<double> z;
    std::vector<Cell> v(100);
    for (auto& c : v) c = z(rng);
    MonthlySeries big("b", {1900, 1}, v);
    auto l12 = lag(big, 12);
    for (size_t t = 12; t < 100; ++t)
        CHECK(*l12.at_index(t) == doctest::Approx(*big.at_index(t - 12)));
    for (size_t t = 0; t < 12; ++t) CHECK_FALSE(l12.at_index(t).has_value());
}

TEST_CASE("DesignMatrix columns share range, reject duplicates, flag missing rows") {
    MonthSpan range{{1900, 1}, {1900, 6}};
    DesignMatrix dm(range);
    dm.add(MonthlySeries("y", {1900, 1},
                         {Cell{1.0}, Cell{2.0}, Cell{}, Cell{4.0}, Cell{5.0}, Cell{6.0}}),
           ColumnRole::dependent);
    dm.add(MonthlySeries("x", {1899, 11},
                         {Cell{0.0}, Cell{0.0}, Cell{1.0}, Cell{1.0}, Cell{1.0}, Cell{0.0},
                          Cell{0.0}, Cell{1.0}}),
           ColumnRole::unrest);
    CHECK(dm.column("x").series.size() == 6);
    CHECK(*dm.value("x", 0) == doctest::Approx(1.0)); // aligned to 1900-01
    CHECK_THROWS_AS(dm.add(MonthlySeries("y", {1900, 1}, {Cell{0.0}}),
                           ColumnRole::control),
                    DataError);
    auto miss = dm.missing_rows();
    CHECK(miss == std::vector<bool>{false, false, true, false, false, false});
    CHECK(dm.with_role(ColumnRole::unrest).size() == 1);
    CHECK_THROWS_AS(dm.column("nope"), DataError);
}
