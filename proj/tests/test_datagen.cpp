#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdda/datagen.hpp"
#include "sdda/errors.hpp"

using namespace sdda;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string temp_path(const std::string& name) {
    return std::string("/tmp/sdda_datagen_") + name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::vector<double> class_mean(const LabeledDataset& ds, int cls) {
    std::vector<double> mu(ds.dim(), 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] != cls) continue;
        ++n;
        for (std::size_t j = 0; j < ds.dim(); ++j) mu[j] += ds.x(i, j);
    }
    for (double& v : mu) v /= double(n);
    return mu;
}

} // namespace

TEST_CASE("default class means sit on a radius-2.5 circle, or a line for d=1") {
    auto m4 = default_class_means(4, 2);
    REQUIRE(m4.size() == 4);
    CHECK(m4[0][0] == 2.5);
    CHECK(m4[0][1] == 0.0);
    CHECK(std::fabs(m4[1][0]) <= 1e-15);
    CHECK(std::fabs(m4[1][1] - 2.5) <= 1e-15);
    for (const auto& m : m4)
        CHECK(std::fabs(std::sqrt(m[0] * m[0] + m[1] * m[1]) - 2.5) <= 1e-12);

    auto m3d = default_class_means(2, 3);
    CHECK(m3d[0].size() == 3);
    CHECK(m3d[0][2] == 0.0);  // extra coordinates stay zero

    auto line = default_class_means(3, 1);
    CHECK(line[0][0] == -2.5);
    CHECK(line[1][0] == 0.0);
    CHECK(line[2][0] == 2.5);
}

TEST_CASE("generate_pair is deterministic and class-balanced") {
    DomainShiftSpec spec;
    spec.classes = 3;
    spec.dim = 2;
    spec.samples_per_class = 40;
    spec.seed = 7;
    spec.target_rotation_deg = 20.0;
    DatasetPair a = generate_pair(spec);
    DatasetPair b = generate_pair(spec);
    CHECK(a.source.x == b.source.x);
    CHECK(a.target.x == b.target.x);
    CHECK(a.source.labels == b.source.labels);
    CHECK(a.target.labels == b.target.labels);
    CHECK(a.source.domain == DomainTag::source);
    CHECK(a.target.domain == DomainTag::target);

    REQUIRE(a.source.size() == 120);
    REQUIRE(a.target.size() == 120);
    for (int cls = 0; cls < 3; ++cls) {
        std::size_t ns = 0, nt = 0;
        for (int y : a.source.labels) ns += (y == cls);
        for (int y : a.target.labels) nt += (y == cls);
        CHECK(ns == 40);
        CHECK(nt == 40);
    }

    // Source and target draws come from distinct substreams.
    CHECK(a.source.x != a.target.x);
}

TEST_CASE("identity transform keeps per-class target means near the source means") {
    DomainShiftSpec spec;
    spec.classes = 3;
    spec.samples_per_class = 200;
    spec.class_stddev = 0.3;
    spec.seed = 11;
    DatasetPair p = generate_pair(spec);
    const double bound = 3.0 * spec.class_stddev / std::sqrt(200.0);
    for (int cls = 0; cls < 3; ++cls) {
        auto ms = class_mean(p.source, cls);
        auto mt = class_mean(p.target, cls);
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(ms[j] - mt[j]) <= bound);
    }
}

TEST_CASE("rotation by 90 degrees sends class mean (1,0) to (0,1)") {
    DomainShiftSpec spec;
    spec.classes = 2;
    spec.class_means = {{1.0, 0.0}, {5.0, 5.0}};
    spec.class_stddev = 0.0;
    spec.samples_per_class = 5;
    spec.target_rotation_deg = 90.0;
    DatasetPair p = generate_pair(spec);
    for (std::size_t i = 0; i < p.target.size(); ++i) {
        if (p.target.labels[i] != 0) continue;
        CHECK(std::fabs(p.target.x(i, 0) - 0.0) <= 1e-15);
        CHECK(std::fabs(p.target.x(i, 1) - 1.0) <= 1e-15);
    }
}

TEST_CASE("a full-turn rotation matches no rotation up to rounding") {
    DomainShiftSpec spec;
    spec.classes = 2;
    spec.samples_per_class = 30;
    spec.class_stddev = 0.25;
    spec.seed = 3;
    spec.target_rotation_deg = 360.0;
    DatasetPair turned = generate_pair(spec);
    spec.target_rotation_deg = 0.0;
    DatasetPair still = generate_pair(spec);
    for (std::size_t i = 0; i < turned.target.x.size(); ++i)
        CHECK(std::fabs(turned.target.x.values()[i] - still.target.x.values()[i]) <= 1e-13);
}

TEST_CASE("zero-spread target rows equal the transformed class means") {
    DomainShiftSpec spec;
    spec.classes = 3;
    spec.class_means = {{2.0, -1.0}, {0.0, 3.0}, {-2.5, 0.5}};
    spec.class_stddev = 0.0;
    spec.samples_per_class = 4;
    spec.target_rotation_deg = 35.0;
    spec.target_scale = 2.0;
    spec.target_translation = {0.5, -0.25};
    DatasetPair p = generate_pair(spec);

    const double th = spec.target_rotation_deg * kPi / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    for (std::size_t i = 0; i < p.target.size(); ++i) {
        const auto& m = spec.class_means[std::size_t(p.target.labels[i])];
        double want0 = spec.target_scale * (ct * m[0] - st * m[1]) + spec.target_translation[0];
        double want1 = spec.target_scale * (st * m[0] + ct * m[1]) + spec.target_translation[1];
        CHECK(std::fabs(p.target.x(i, 0) - want0) <= 1e-14 * std::max(1.0, std::fabs(want0)));
        CHECK(std::fabs(p.target.x(i, 1) - want1) <= 1e-14 * std::max(1.0, std::fabs(want1)));
    }

    // Source rows are the untouched means.
    for (std::size_t i = 0; i < p.source.size(); ++i) {
        const auto& m = spec.class_means[std::size_t(p.source.labels[i])];
        CHECK(p.source.x(i, 0) == m[0]);
        CHECK(p.source.x(i, 1) == m[1]);
    }
}

TEST_CASE("noiseless two moons lie on their half circles") {
    DomainShiftSpec spec;
    spec.shape = DatasetShape::two_moons;
    spec.classes = 2;
    spec.dim = 2;
    spec.samples_per_class = 25;
    spec.class_stddev = 0.0;
    DatasetPair p = generate_pair(spec);
    REQUIRE(p.source.size() == 50);

    bool saw_first_point = false;
    for (std::size_t i = 0; i < p.source.size(); ++i) {
        const double x = p.source.x(i, 0), y = p.source.x(i, 1);
        if (p.source.labels[i] == 0) {
            CHECK(std::fabs(x * x + y * y - 1.0) <= 1e-14);
            CHECK(y >= -1e-14);  // upper arc
            if (!saw_first_point) {
                CHECK(x == 1.0);  // t = 0
                CHECK(y == 0.0);
                saw_first_point = true;
            }
        } else {
            const double dx = x - 1.0, dy = y - 0.5;
            CHECK(std::fabs(dx * dx + dy * dy - 1.0) <= 1e-14);
            CHECK(dy <= 1e-14);  // lower arc
        }
    }
}

TEST_CASE("spec validation rejects out-of-range fields") {
    DomainShiftSpec ok;
    CHECK_NOTHROW(generate_pair(ok));

    auto expect_throw = [](auto mutate) {
        DomainShiftSpec s;
        mutate(s);
        CHECK_THROWS_AS(generate_pair(s), std::invalid_argument);
    };
    expect_throw([](DomainShiftSpec& s) { s.classes = 1; });
    expect_throw([](DomainShiftSpec& s) { s.dim = 0; });
    expect_throw([](DomainShiftSpec& s) { s.samples_per_class = 0; });
    expect_throw([](DomainShiftSpec& s) { s.class_stddev = -0.1; });
    expect_throw([](DomainShiftSpec& s) { s.target_noise_std = -0.1; });
    expect_throw([](DomainShiftSpec& s) { s.target_scale = 0.0; });
    expect_throw([](DomainShiftSpec& s) { s.shape = DatasetShape::two_moons; s.classes = 3; });
    expect_throw([](DomainShiftSpec& s) { s.shape = DatasetShape::two_moons; s.dim = 3; });
    expect_throw([](DomainShiftSpec& s) { s.class_means = {{1.0, 0.0}}; });
    expect_throw([](DomainShiftSpec& s) { s.class_means = {{1.0}, {2.0}, {3.0}}; });
    expect_throw([](DomainShiftSpec& s) { s.target_translation = {1.0, 2.0, 3.0}; });
}

TEST_CASE("dataset shape names round trip") {
    DatasetShape out{};
    CHECK(shape_from_string("gaussian_blobs", out));
    CHECK(out == DatasetShape::gaussian_blobs);
    CHECK(shape_from_string("two_moons", out));
    CHECK(out == DatasetShape::two_moons);
    CHECK_FALSE(shape_from_string("spiral", out));
    CHECK(to_string(DatasetShape::two_moons) == "two_moons");
}

TEST_CASE("csv read-back of a literal three-line file") {
    const std::string path = temp_path("direct.csv");
    write_file(path, "0.0,1.0,0\n1.0,0.0,1\n0.5,0.5,0\n");
    LabeledDataset ds = load_csv(path, true);
    REQUIRE(ds.size() == 3);
    REQUIRE(ds.dim() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.x(0, 1) == 1.0);
    CHECK(ds.x(2, 0) == 0.5);

    // Blank lines and CRLF endings are tolerated.
    write_file(path, "1.0,2.0\r\n\n  \n3.0,4.0\n");
    LabeledDataset plain = load_csv(path, false);
    REQUIRE(plain.size() == 2);
    CHECK(plain.dim() == 2);
    CHECK(plain.labels == std::vector<int>{0, 0});
    CHECK(plain.x(1, 1) == 4.0);
    std::remove(path.c_str());
}

TEST_CASE("csv round trip is bit-identical") {
    DomainShiftSpec spec;
    spec.samples_per_class = 10;
    spec.seed = 19;
    spec.target_rotation_deg = 12.3;
    spec.target_noise_std = 0.05;
    DatasetPair p = generate_pair(spec);

    const std::string path = temp_path("roundtrip.csv");
    save_csv(path, p.target, true);
    LabeledDataset back = load_csv(path, true);
    CHECK(back.x == p.target.x);
    CHECK(back.labels == p.target.labels);

    save_csv(path, p.source, false);
    LabeledDataset unlabeled = load_csv(path, false);
    CHECK(unlabeled.x == p.source.x);
    CHECK(unlabeled.labels == std::vector<int>(p.source.size(), 0));
    std::remove(path.c_str());
}

TEST_CASE("csv errors carry the path and 1-based line number") {
    const std::string path = temp_path("bad.csv");

    CHECK_THROWS_AS(load_csv(temp_path("missing.csv"), false), io_error);

    write_file(path, "");
    try {
        load_csv(path, false);
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }

    write_file(path, "1.0,2.0\n3.0,4.0\n5.0\n");
    try {
        load_csv(path, false);
        FAIL("expected io_error");
    } catch (const io_error& e) {
        std::string msg = e.what();
        CHECK(msg.find(":3:") != std::string::npos);
        CHECK(msg.find("fields") != std::string::npos);
    }

    write_file(path, "1.0,2.0\n1.0,oops\n");
    try {
        load_csv(path, false);
        FAIL("expected io_error");
    } catch (const io_error& e) {
        std::string msg = e.what();
        CHECK(msg.find(":2:") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }

    write_file(path, "1.0,2.0,1\n1.0,2.0,-1\n");
    CHECK_THROWS_AS(load_csv(path, true), io_error);
    write_file(path, "1.0,2.0,1.5\n");
    CHECK_THROWS_AS(load_csv(path, true), io_error);
    std::remove(path.c_str());
}

TEST_CASE("g17 formatting survives a parse round trip on awkward values") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.141592653589793, 0.0}) {
        CHECK(std::stod(format_g17(v)) == v);
    }
}
