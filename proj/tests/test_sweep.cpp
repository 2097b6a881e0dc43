#include "levitrap/config.hpp"
#include "levitrap/errors.hpp"
#include "levitrap/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

using namespace levitrap;

namespace {

TrapResult fake_trap(double field, double fx, double fy, double fz, double fr, double offset) {
    TrapResult t;
    t.field = field;
    t.current = field / 0.125;
    t.frequency = {fx, fy, fz};
    t.frequency_diagonal = fr;
    t.center_offset_toward_slit = offset;
    return t;
}

const ComparisonRow* find(const std::vector<ComparisonRow>& rows, const std::string& prefix) {
    for (const auto& r : rows)
        if (r.quantity.rfind(prefix, 0) == 0) return &r;
    return nullptr;
}

}  // namespace

TEST_CASE("slope through the origin") {
    const auto [s, e] = slope_through_origin({1, 2, 3, 4}, {2, 4, 6, 8});
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e == doctest::Approx(0.0).epsilon(1e-14));
    // Normal equations: s = sum(xy) / sum(x^2).
    const auto [s2, e2] = slope_through_origin({1, 2}, {1, 3});
    CHECK(s2 == doctest::Approx(7.0 / 5.0).epsilon(1e-14));
    CHECK(e2 > 0.0);
    CHECK_THROWS_AS(slope_through_origin({}, {}), DomainError);
    CHECK_THROWS_AS(slope_through_origin({0, 0}, {1, 2}), DomainError);
}

TEST_CASE("comparison rows from synthetic inputs") {
    SweepResult s;
    for (double b : {12.5e-3, 25e-3, 37.5e-3, 50e-3}) {
        SweepRow r;
        r.field = b;
        r.ok = true;
        const double fz = 5.6e3 * b;
        r.trap = fake_trap(b, 1.5 * fz, 1.6 * fz, fz, 1.3 * fz, 20e-6);
        r.ordering_ok = true;
        r.q.emplace_back(ScanAxis::z, 1e3 * std::sqrt(50e-3 / b));
        s.rows.push_back(r);
    }
    SweepRow bad;
    bad.field = 75e-3;
    bad.error = "drive current exceeds the coil limit";
    s.rows.push_back(bad);
    s.slope = 5.6e3;
    s.slope_error = 0.0;
    s.q_exponent = -0.5;
    s.q_exponent_error = 0.0;
    s.q_monotone = true;
    s.ordering_ok = true;

    ComparisonInputs in;
    in.sweep = s;
    in.liftoff = LiftoffResult{7.5e-3, 0.06, 0.0};
    in.jc_nb = 2.52e8;
    in.jc_ybco = 2.3e9;
    bean::HpenFit h;
    h.hpen0 = 0.122;
    in.hpen_nb = h;
    RingdownResult rd;
    rd.q = 1010.0;
    in.ringdown = rd;
    NegativeControl perm;
    perm.name = "mu_r = 1";
    perm.trapped = false;
    NegativeControl ring;
    ring.name = "closed ring";
    ring.magnet_constant = 1e-4;
    ring.nominal_magnet_constant = 0.12;
    ring.nominal_liftoff_current = 0.07;
    in.controls = {perm, ring};

    const auto rows = compare_to_paper(in);
    CHECK(find(rows, "f_z slope")->pass);
    CHECK(find(rows, "rows with")->computed == 1.0);
    CHECK(find(rows, "f_y / f_z")->computed == doctest::Approx(1.6));
    CHECK(find(rows, "f_x / f_z")->pass);
    CHECK(find(rows, "trap offset")->computed == doctest::Approx(20.0));
    CHECK(find(rows, "lift-off")->pass);
    const auto* q = find(rows, "eddy Q_z");
    REQUIRE(q != nullptr);
    CHECK(q->computed == doctest::Approx(1e3));
    CHECK(find(rows, "Q_z decreasing")->pass);
    CHECK(!find(rows, "Q(B) exponent")->gated);
    CHECK(find(rows, "J_c Nb")->pass);
    CHECK(!find(rows, "J_c YBCO")->pass);  // 8 % low
    CHECK(find(rows, "H_pen(0)")->pass);
    CHECK(find(rows, "ringdown Q")->computed == doctest::Approx(0.01));
    CHECK(find(rows, "mu_r = 1")->pass);
    CHECK(find(rows, "closed ring: hole")->pass);
    // No lift-off in range counts as an infinite current ratio.
    CHECK(find(rows, "closed ring: lift-off")->pass);

    const std::string csv = comparison_csv(rows);
    CHECK(csv.rfind("criterion,quantity,computed,published,lo,hi,gated,pass\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size() + 1));

    in.controls[0].trapped = true;
    CHECK(!find(compare_to_paper(in), "mu_r = 1")->pass);

    // A missing slope gives NaN, which fails its band.
    SweepResult empty;
    const auto r2 = compare_to_paper(empty);
    CHECK(std::isnan(r2.front().computed));
    CHECK(!r2.front().pass);
}

TEST_CASE("sweep CSV and plots") {
    SweepResult s;
    SweepRow r;
    r.field = 37.5e-3;
    r.ok = true;
    r.trap = fake_trap(37.5e-3, 224.7, 184.8, 65.7, 134.5, 11.9e-6);
    r.q.emplace_back(ScanAxis::z, 55.0);
    s.rows.push_back(r);
    SweepRow bad;
    bad.field = 75e-3;
    bad.error = "over limit, by 13 mA";
    s.rows.push_back(bad);
    const std::string csv = sweep_csv(s);
    CHECK(csv.find("37.5,ok,") != std::string::npos);
    CHECK(csv.find("75,\"over limit; by 13 mA\"") != std::string::npos);
    // Every data row has the same column count as the header.
    std::size_t start = 0;
    while (start < csv.size()) {
        const std::size_t end = csv.find('\n', start);
        const std::string line = csv.substr(start, end - start);
        if (!line.empty() && line[0] != '#') CHECK(std::count(line.begin(), line.end(), ',') == 12);
        start = end + 1;
    }
    for (const std::string& svg : {frequency_svg(s), q_svg(s)}) {
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
}

TEST_CASE("sweep keeps out-of-range points as failed rows") {
    const ExperimentConfig cfg = table1_config();
    CHECK_THROWS_AS(check_field_guards(cfg, 0.3), ValidationError);
    ForceModel model(cfg);
    const auto r = run_frequency_sweep(model, {0.5, -0.01});
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].field == -0.01);
    for (const auto& row : r.rows) {
        CHECK(!row.ok);
        CHECK(!row.error.empty());
    }
    CHECK(!r.slope);
    CHECK(model.solves() == 0);
    SweepOptions bad;
    bad.lateral = false;
    bad.q_axes = {ScanAxis::x};
    CHECK_THROWS_AS(run_frequency_sweep(model, {0.01}, bad), DomainError);
}
