#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "sdda/config.hpp"
#include "sdda/errors.hpp"

using namespace sdda;

namespace {

const char* kMinimal =
    "[data]\n"
    "shape = gaussian_blobs\n"
    "\n"
    "[trainer]\n"
    "epochs = 5\n";

config_error capture(const std::string& text) {
    try {
        parse_config(text);
    } catch (const config_error& e) {
        return e;
    }
    FAIL("expected config_error");
    return config_error("unreachable");
}

} // namespace

TEST_CASE("minimal config fills every documented default") {
    ExperimentConfig c = parse_config(kMinimal);

    CHECK_FALSE(c.data.from_csv);
    CHECK(c.data.spec.shape == DatasetShape::gaussian_blobs);
    CHECK(c.data.spec.classes == 3);
    CHECK(c.data.spec.dim == 2);
    CHECK(c.data.spec.samples_per_class == 100);
    CHECK(c.data.spec.class_stddev == 0.3);
    CHECK(c.data.spec.class_means.empty());
    CHECK(c.data.spec.target_rotation_deg == 0.0);
    CHECK(c.data.spec.target_translation.empty());
    CHECK(c.data.spec.target_scale == 1.0);
    CHECK(c.data.spec.target_noise_std == 0.0);
    CHECK(c.data.spec.seed == 1);

    CHECK(c.trainer.lambda_ssc == 1000.0);
    CHECK(c.trainer.lambda_intra == 0.003);
    CHECK(c.trainer.lambda_inter == 0.0001);
    CHECK(c.trainer.metric == MetricKind::ssc);
    CHECK(c.trainer.similarity.tag == Similarity::heat_kernel);
    CHECK(c.trainer.similarity.gamma == 0.001);
    CHECK(c.trainer.target_norm == 10.0);
    CHECK(c.trainer.margin == 0.0);
    CHECK(c.trainer.center_alpha == 0.5);
    CHECK(c.trainer.batch_size == 32);
    CHECK(c.trainer.epochs == 5);
    CHECK(c.trainer.learning_rate == 1e-4);
    CHECK(c.trainer.schedule_mu == 10.0);
    CHECK(c.trainer.schedule_enabled);
    CHECK(c.trainer.seed == 1);
    CHECK(c.trainer.layer_dims.empty());
    CHECK(c.layer_dims_auto);
    CHECK(c.trainer.hidden_activation == Activation::relu);

    CHECK(c.output.dir == "out");
    CHECK(c.output.emit_svg);
    CHECK_FALSE(c.output.emit_features);
    CHECK(c.output.seeds.empty());
}

TEST_CASE("full generated-data config matches the hand-parsed fixture") {
    const std::string text =
        "# full fixture\n"
        "[data]\n"
        "shape = two_moons\n"
        "classes = 2\n"
        "dim = 2\n"
        "samples_per_class = 50\n"
        "class_stddev = 0.15\n"
        "target_rotation_deg = 30.5\n"
        "target_translation = 0.4,-0.2\n"
        "target_scale = 1.25\n"
        "target_noise_std = 0.05\n"
        "seed = 9\n"
        "\n"
        "[trainer]\n"
        "lambda_ssc = 500\n"
        "lambda_intra = 0.01\n"
        "lambda_inter = 0.0005\n"
        "metric = msm\n"
        "similarity = cosine\n"
        "gamma = 0.25\n"
        "target_norm = 7.5\n"
        "margin = 2\n"
        "center_alpha = 0.9\n"
        "batch_size = 16\n"
        "epochs = 40\n"
        "learning_rate = 0.001\n"
        "schedule_mu = 5\n"
        "schedule_enabled = false\n"
        "seed = 77\n"
        "layer_dims = 2,32,16,2\n"
        "activation = tanh\n"
        "\n"
        "[output]\n"
        "dir = /tmp/out_fixture\n"
        "emit_svg = false\n"
        "emit_features = true\n"
        "seeds = 1,2,3\n";
    ExperimentConfig c = parse_config(text);

    CHECK(c.data.spec.shape == DatasetShape::two_moons);
    CHECK(c.data.spec.classes == 2);
    CHECK(c.data.spec.dim == 2);
    CHECK(c.data.spec.samples_per_class == 50);
    CHECK(c.data.spec.class_stddev == 0.15);
    CHECK(c.data.spec.target_rotation_deg == 30.5);
    CHECK(c.data.spec.target_translation == std::vector<double>{0.4, -0.2});
    CHECK(c.data.spec.target_scale == 1.25);
    CHECK(c.data.spec.target_noise_std == 0.05);
    CHECK(c.data.spec.seed == 9);

    CHECK(c.trainer.lambda_ssc == 500.0);
    CHECK(c.trainer.lambda_intra == 0.01);
    CHECK(c.trainer.lambda_inter == 0.0005);
    CHECK(c.trainer.metric == MetricKind::msm);
    CHECK(c.trainer.similarity.tag == Similarity::cosine);
    CHECK(c.trainer.similarity.gamma == 0.25);
    CHECK(c.trainer.target_norm == 7.5);
    CHECK(c.trainer.margin == 2.0);
    CHECK(c.trainer.center_alpha == 0.9);
    CHECK(c.trainer.batch_size == 16);
    CHECK(c.trainer.epochs == 40);
    CHECK(c.trainer.learning_rate == 0.001);
    CHECK(c.trainer.schedule_mu == 5.0);
    CHECK_FALSE(c.trainer.schedule_enabled);
    CHECK(c.trainer.seed == 77);
    CHECK(c.trainer.layer_dims == std::vector<std::size_t>{2, 32, 16, 2});
    CHECK_FALSE(c.layer_dims_auto);
    CHECK(c.trainer.hidden_activation == Activation::tanh);

    CHECK(c.output.dir == "/tmp/out_fixture");
    CHECK_FALSE(c.output.emit_svg);
    CHECK(c.output.emit_features);
    CHECK(c.output.seeds == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("csv-mode config and blob class means parse") {
    ExperimentConfig c = parse_config(
        "[data]\n"
        "source_csv = /tmp/a.csv\n"
        "target_csv = /tmp/b.csv\n"
        "[trainer]\n"
        "epochs = 2\n");
    CHECK(c.data.from_csv);
    CHECK(c.data.source_csv == "/tmp/a.csv");
    CHECK(c.data.target_csv == "/tmp/b.csv");

    ExperimentConfig m = parse_config(
        "[data]\n"
        "shape = gaussian_blobs\n"
        "classes = 3\n"
        "dim = 2\n"
        "class_means = 1,0; 0,1; -1,0\n"
        "[trainer]\n"
        "epochs = 1\n");
    REQUIRE(m.data.spec.class_means.size() == 3);
    CHECK(m.data.spec.class_means[1] == std::vector<double>{0.0, 1.0});
    CHECK(m.data.spec.class_means[2] == std::vector<double>{-1.0, 0.0});
}

TEST_CASE("comments, blank lines, crlf endings, and inline comments are tolerated") {
    ExperimentConfig c = parse_config(
        "# leading comment\r\n"
        "[data]\r\n"
        "shape = gaussian_blobs  # the default shape\r\n"
        "\r\n"
        "[trainer]\r\n"
        "epochs = 7 # one week\r\n");
    CHECK(c.trainer.epochs == 7);
    CHECK(c.data.spec.shape == DatasetShape::gaussian_blobs);
}

TEST_CASE("malformed values report their line") {
    const std::string text =
        "[data]\n"                 // line 1
        "shape = gaussian_blobs\n" // line 2
        "[trainer]\n"              // line 3
        "epochs = 3\n"             // line 4
        "lambda_ssc = banana\n";   // line 5
    config_error e = capture(text);
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("lambda_ssc") != std::string::npos);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
}

TEST_CASE("structurally broken configs are rejected with lines") {
    // Unknown section.
    CHECK(capture("[bogus]\nx = 1\n").line() == 1);
    // Key outside any section.
    CHECK(capture("epochs = 3\n").line() == 1);
    // Missing '='.
    CHECK(capture("[data]\nshape gaussian_blobs\n").line() == 2);
    // Unknown keys, one per section.
    CHECK(capture("[data]\nshape = gaussian_blobs\nwat = 1\n[trainer]\nepochs = 1\n").line() == 3);
    CHECK(capture("[data]\nshape = gaussian_blobs\n[trainer]\nepochs = 1\nwat = 1\n").line() == 5);
    CHECK(capture("[data]\nshape = gaussian_blobs\n[trainer]\nepochs = 1\n[output]\nwat = 1\n").line() == 6);
    // Duplicate key.
    CHECK(capture("[data]\nshape = gaussian_blobs\nshape = two_moons\n[trainer]\nepochs = 1\n").line() == 3);
}

TEST_CASE("required sections and keys") {
    CHECK_THROWS_AS(parse_config(""), config_error);
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\n"), config_error);
    CHECK_THROWS_AS(parse_config("[trainer]\nepochs = 1\n"), config_error);
    // [data] without a shape or csv pair.
    CHECK_THROWS_AS(parse_config("[data]\nclasses = 3\n[trainer]\nepochs = 1\n"), config_error);
    // [trainer] without epochs.
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\n[trainer]\nbatch_size = 8\n"),
                    config_error);
}

TEST_CASE("csv keys must come as a pair and exclude generation keys") {
    config_error lonely = capture(
        "[data]\n"
        "source_csv = /tmp/a.csv\n"
        "[trainer]\n"
        "epochs = 1\n");
    CHECK(lonely.line() == 2);

    config_error mixed = capture(
        "[data]\n"
        "source_csv = /tmp/a.csv\n"
        "target_csv = /tmp/b.csv\n"
        "classes = 3\n"
        "[trainer]\n"
        "epochs = 1\n");
    CHECK(mixed.line() == 4);
    CHECK(std::string(mixed.what()).find("classes") != std::string::npos);
}

TEST_CASE("two moons pins classes and dim") {
    ExperimentConfig ok = parse_config(
        "[data]\nshape = two_moons\n[trainer]\nepochs = 1\n");
    CHECK(ok.data.spec.classes == 2);
    CHECK(ok.data.spec.dim == 2);

    ExperimentConfig explicit_ok = parse_config(
        "[data]\nshape = two_moons\nclasses = 2\ndim = 2\n[trainer]\nepochs = 1\n");
    CHECK(explicit_ok.data.spec.classes == 2);

    CHECK(capture("[data]\nshape = two_moons\nclasses = 3\n[trainer]\nepochs = 1\n").line() == 3);
    CHECK(capture("[data]\nshape = two_moons\ndim = 3\n[trainer]\nepochs = 1\n").line() == 3);
}

TEST_CASE("shape and width cross-checks") {
    // class_means must match the class count and dim.
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\nclasses = 3\n"
                                 "class_means = 1,0; 0,1\n[trainer]\nepochs = 1\n"),
                    config_error);
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\nclasses = 2\ndim = 2\n"
                                 "class_means = 1; 2\n[trainer]\nepochs = 1\n"),
                    config_error);
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\ndim = 2\n"
                                 "target_translation = 1,2,3\n[trainer]\nepochs = 1\n"),
                    config_error);
    // Explicit layer_dims must match the generated data's shape.
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\ndim = 2\nclasses = 3\n"
                                 "[trainer]\nepochs = 1\nlayer_dims = 3,8,3\n"),
                    config_error);
    CHECK_THROWS_AS(parse_config("[data]\nshape = gaussian_blobs\ndim = 2\nclasses = 3\n"
                                 "[trainer]\nepochs = 1\nlayer_dims = 2,8,4\n"),
                    config_error);
    ExperimentConfig ok = parse_config("[data]\nshape = gaussian_blobs\ndim = 2\nclasses = 3\n"
                                       "[trainer]\nepochs = 1\nlayer_dims = 2,8,3\n");
    CHECK_FALSE(ok.layer_dims_auto);
}

TEST_CASE("range checks on scalar values") {
    auto bad = [](const std::string& trainer_line) {
        return std::string("[data]\nshape = gaussian_blobs\n[trainer]\nepochs = 1\n") +
               trainer_line + "\n";
    };
    CHECK_THROWS_AS(parse_config(bad("lambda_ssc = -1")), config_error);
    CHECK_THROWS_AS(parse_config(bad("gamma = 0")), config_error);
    CHECK_THROWS_AS(parse_config(bad("target_norm = 0")), config_error);
    CHECK_THROWS_AS(parse_config(bad("margin = -2")), config_error);
    CHECK_THROWS_AS(parse_config(bad("center_alpha = 1.5")), config_error);
    CHECK_THROWS_AS(parse_config(bad("batch_size = 0")), config_error);
    CHECK_THROWS_AS(parse_config(bad("batch_size = 1")), config_error);  // metric defaults to ssc
    CHECK_THROWS_AS(parse_config(bad("learning_rate = 0")), config_error);
    CHECK_THROWS_AS(parse_config(bad("schedule_mu = -1")), config_error);
    CHECK_THROWS_AS(parse_config(bad("schedule_enabled = yes")), config_error);
    CHECK_THROWS_AS(parse_config(bad("metric = banana")), config_error);
    CHECK_THROWS_AS(parse_config(bad("similarity = banana")), config_error);
    CHECK_THROWS_AS(parse_config(bad("activation = banana")), config_error);
    CHECK_THROWS_AS(parse_config(bad("epochs = -3")), config_error);
    CHECK_THROWS_AS(parse_config(bad("seed = -1")), config_error);
    CHECK_THROWS_AS(parse_config(bad("layer_dims = 2,0,3")), config_error);

    // batch_size = 1 is fine without a metric.
    ExperimentConfig ok = parse_config(
        "[data]\nshape = gaussian_blobs\n[trainer]\nepochs = 1\nmetric = none\nbatch_size = 1\n");
    CHECK(ok.trainer.batch_size == 1);
}

TEST_CASE("sweep seeds reject duplicates") {
    config_error e = capture(
        "[data]\nshape = gaussian_blobs\n[trainer]\nepochs = 1\n"
        "[output]\nseeds = 4,5,4\n");
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
}

TEST_CASE("print_config round trips exactly and is byte-stable") {
    ExperimentConfig minimal = parse_config(kMinimal);
    std::string dump = print_config(minimal);
    ExperimentConfig back = parse_config(dump);
    CHECK(back == minimal);
    CHECK(print_config(back) == dump);

    // A config exercising every branch: explicit means, csv off, sweep on.
    ExperimentConfig full = parse_config(
        "[data]\n"
        "shape = gaussian_blobs\n"
        "classes = 2\n"
        "dim = 3\n"
        "class_means = 1,0,0; -1,0.5,2.25\n"
        "class_stddev = 0.125\n"
        "target_rotation_deg = -15\n"
        "target_translation = 0.1,0.2,0.3\n"
        "target_scale = 0.5\n"
        "target_noise_std = 0.01\n"
        "[trainer]\n"
        "epochs = 3\n"
        "metric = cmd\n"
        "layer_dims = 3,10,4,2\n"
        "activation = tanh\n"
        "schedule_enabled = false\n"
        "learning_rate = 0.00025\n"
        "[output]\n"
        "dir = results\n"
        "seeds = 11,12\n"
        "emit_features = true\n");
    std::string full_dump = print_config(full);
    ExperimentConfig full_back = parse_config(full_dump);
    CHECK(full_back == full);
    CHECK(print_config(full_back) == full_dump);

    ExperimentConfig csv = parse_config(
        "[data]\nsource_csv = a.csv\ntarget_csv = b.csv\n[trainer]\nepochs = 1\n");
    CHECK(parse_config(print_config(csv)) == csv);
}
