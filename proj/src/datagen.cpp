#include "sdda/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sdda/errors.hpp"
#include "sdda/rng.hpp"

namespace sdda {
namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const DomainShiftSpec& spec) {
    if (spec.classes < 2) throw std::invalid_argument("datagen: classes must be >= 2");
    if (spec.dim < 1) throw std::invalid_argument("datagen: dim must be >= 1");
    if (spec.samples_per_class < 1)
        throw std::invalid_argument("datagen: samples_per_class must be >= 1");
    if (spec.class_stddev < 0.0)
        throw std::invalid_argument("datagen: class_stddev must be >= 0");
    if (spec.target_noise_std < 0.0)
        throw std::invalid_argument("datagen: target_noise_std must be >= 0");
    if (!(spec.target_scale > 0.0))
        throw std::invalid_argument("datagen: target_scale must be > 0");
    if (spec.shape == DatasetShape::two_moons) {
        if (spec.classes != 2) throw std::invalid_argument("datagen: two_moons requires classes=2");
        if (spec.dim != 2) throw std::invalid_argument("datagen: two_moons requires dim=2");
    }
    if (!spec.class_means.empty()) {
        if (spec.class_means.size() != spec.classes)
            throw std::invalid_argument("datagen: class_means must list one mean per class");
        for (const auto& m : spec.class_means)
            if (m.size() != spec.dim)
                throw std::invalid_argument("datagen: each class mean must have dim entries");
    }
    if (!spec.target_translation.empty() && spec.target_translation.size() != spec.dim)
        throw std::invalid_argument("datagen: target_translation must have dim entries");
}

// One domain's raw draw, before any target transform.
LabeledDataset draw_domain(const DomainShiftSpec& spec, Rng& rng, DomainTag tag) {
    const std::size_t n = spec.classes * spec.samples_per_class;
    LabeledDataset ds;
    ds.x = Matrix(n, spec.dim);
    ds.labels.resize(n);
    ds.domain = tag;

    if (spec.shape == DatasetShape::gaussian_blobs) {
        const auto means =
            spec.class_means.empty() ? default_class_means(spec.classes, spec.dim) : spec.class_means;
        std::size_t r = 0;
        for (std::size_t c = 0; c < spec.classes; ++c) {
            for (std::size_t s = 0; s < spec.samples_per_class; ++s, ++r) {
                for (std::size_t j = 0; j < spec.dim; ++j)
                    ds.x(r, j) = means[c][j] + spec.class_stddev * rng.gaussian(0.0, 1.0);
                ds.labels[r] = static_cast<int>(c);
            }
        }
    } else {
        // Interleaved half circles: class 0 is the upper arc, class 1 the
        // shifted lower arc, parameterised evenly over [0, pi].
        const std::size_t m = spec.samples_per_class;
        std::size_t r = 0;
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t s = 0; s < m; ++s, ++r) {
                const double t = m > 1 ? kPi * static_cast<double>(s) / static_cast<double>(m - 1)
                                       : 0.0;
                double px, py;
                if (c == 0) {
                    px = std::cos(t);
                    py = std::sin(t);
                } else {
                    px = 1.0 - std::cos(t);
                    py = 0.5 - std::sin(t);
                }
                ds.x(r, 0) = px + spec.class_stddev * rng.gaussian(0.0, 1.0);
                ds.x(r, 1) = py + spec.class_stddev * rng.gaussian(0.0, 1.0);
                ds.labels[r] = static_cast<int>(c);
            }
        }
    }
    return ds;
}

void apply_domain_shift(const DomainShiftSpec& spec, Rng& rng, LabeledDataset& ds) {
    const double theta = spec.target_rotation_deg * kPi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        if (ds.dim() >= 2) {
            const double x0 = ds.x(r, 0);
            const double x1 = ds.x(r, 1);
            ds.x(r, 0) = ct * x0 - st * x1;
            ds.x(r, 1) = st * x0 + ct * x1;
        }
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            double v = spec.target_scale * ds.x(r, j);
            if (!spec.target_translation.empty()) v += spec.target_translation[j];
            ds.x(r, j) = v;
        }
    }
    if (spec.target_noise_std > 0.0) {
        for (std::size_t r = 0; r < ds.size(); ++r)
            for (std::size_t j = 0; j < ds.dim(); ++j)
                ds.x(r, j) += spec.target_noise_std * rng.gaussian(0.0, 1.0);
    }
}

} // namespace

std::string to_string(DatasetShape s) {
    return s == DatasetShape::gaussian_blobs ? "gaussian_blobs" : "two_moons";
}

bool shape_from_string(const std::string& s, DatasetShape& out) {
    if (s == "gaussian_blobs") out = DatasetShape::gaussian_blobs;
    else if (s == "two_moons") out = DatasetShape::two_moons;
    else return false;
    return true;
}

std::vector<std::vector<double>> default_class_means(std::size_t classes, std::size_t dim) {
    std::vector<std::vector<double>> means(classes, std::vector<double>(dim, 0.0));
    constexpr double radius = 2.5;
    if (dim == 1) {
        // Spread evenly along the line.
        for (std::size_t c = 0; c < classes; ++c) {
            const double frac =
                classes > 1 ? static_cast<double>(c) / static_cast<double>(classes - 1) : 0.5;
            means[c][0] = radius * (2.0 * frac - 1.0);
        }
        return means;
    }
    for (std::size_t c = 0; c < classes; ++c) {
        const double angle = 2.0 * kPi * static_cast<double>(c) / static_cast<double>(classes);
        means[c][0] = radius * std::cos(angle);
        means[c][1] = radius * std::sin(angle);
    }
    return means;
}

DatasetPair generate_pair(const DomainShiftSpec& spec) {
    validate(spec);
    Rng base(spec.seed);
    Rng src_rng = base.substream(0);
    Rng tgt_rng = base.substream(1);

    DatasetPair pair;
    pair.source = draw_domain(spec, src_rng, DomainTag::source);
    pair.target = draw_domain(spec, tgt_rng, DomainTag::target);
    apply_domain_shift(spec, tgt_rng, pair.target);
    return pair;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LabeledDataset load_csv(const std::string& path, bool has_labels) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected_fields = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }

        const std::size_t min_fields = has_labels ? 2 : 1;
        if (fields.size() < min_fields)
            throw io_error(path + ":" + std::to_string(lineno) + ": too few fields");
        if (expected_fields == 0) {
            expected_fields = fields.size();
        } else if (fields.size() != expected_fields) {
            throw io_error(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(expected_fields) + " fields, found " +
                           std::to_string(fields.size()));
        }

        const std::size_t feature_count = has_labels ? fields.size() - 1 : fields.size();
        std::vector<double> row(feature_count);
        for (std::size_t j = 0; j < feature_count; ++j) {
            try {
                std::size_t used = 0;
                row[j] = std::stod(fields[j], &used);
                while (used < fields[j].size() &&
                       (fields[j][used] == ' ' || fields[j][used] == '\t'))
                    ++used;
                if (used != fields[j].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw io_error(path + ":" + std::to_string(lineno) + ": bad numeric field '" +
                               fields[j] + "'");
            }
        }
        if (has_labels) {
            const std::string& f = fields.back();
            try {
                std::size_t used = 0;
                const long lab = std::stol(f, &used, 10);
                if (used != f.size()) throw std::invalid_argument("trailing characters");
                if (lab < 0) throw std::invalid_argument("negative");
                labels.push_back(static_cast<int>(lab));
            } catch (const std::exception&) {
                throw io_error(path + ":" + std::to_string(lineno) + ": bad label field '" + f +
                               "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error(path + ":1: no data rows");

    LabeledDataset ds;
    ds.x = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t j = 0; j < rows[r].size(); ++j) ds.x(r, j) = rows[r][j];
    ds.labels = std::move(labels);
    if (!has_labels) ds.labels.assign(ds.size(), 0);
    return ds;
}

void save_csv(const std::string& path, const LabeledDataset& ds, bool write_labels) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        std::string line;
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            if (j) line += ',';
            line += format_g17(ds.x(r, j));
        }
        if (write_labels) {
            line += ',';
            line += std::to_string(ds.labels[r]);
        }
        out << line << '\n';
    }
    if (!out) throw io_error("write failed for " + path);
}

} // namespace sdda
