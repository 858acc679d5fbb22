#include "iqbench/iqcore.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "iqbench/rng.hpp"

namespace iqbench {

bool IQPoint::finite() const { return std::isfinite(i) && std::isfinite(q); }

StateLabel label_from_int(int v) {
    if (v == 0) return StateLabel::Ground;
    if (v == 1) return StateLabel::Excited;
    throw Error("state label must be 0 or 1, got " + std::to_string(v));
}

Dataset::Dataset(std::vector<LabeledShot> shots, std::uint64_t seed)
    : shots_(std::move(shots)), seed_(seed) {
    for (const auto& s : shots_) {
        if (!s.point.finite()) throw NonFiniteValueError("dataset admits only finite I/Q values");
        if (s.label == StateLabel::Excited) ++count_excited_;
    }
}

void Dataset::require_both_classes() const {
    if (count(StateLabel::Ground) == 0) throw EmptyClassError("no ground-state shots in dataset");
    if (count(StateLabel::Excited) == 0) throw EmptyClassError("no excited-state shots in dataset");
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = k;
    Rng rng(seed);
    rng.shuffle(idx);
    return idx;
}

}  // namespace

SplitDataset split(const Dataset& data, double test_fraction, std::uint64_t seed, bool stratified) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw BadFractionError("test_fraction must lie in (0,1)");
    if (data.size() < 4) throw Error("split requires at least 4 shots");
    data.require_both_classes();

    const std::size_t n = data.size();
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order = shuffled_indices(n, seed);
    std::vector<std::size_t> test_idx;
    std::vector<std::size_t> train_idx;
    test_idx.reserve(n_test);
    train_idx.reserve(n - n_test);

    if (!stratified) {
        test_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
        train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    } else {
        // Per-class quotas by largest remainder so the total still equals
        // round(test_fraction * N).
        const auto& shots = data.shots();
        std::size_t n_exc = data.count(StateLabel::Excited);
        std::size_t n_gnd = n - n_exc;
        const double exact_g = test_fraction * static_cast<double>(n_gnd);
        const double exact_e = test_fraction * static_cast<double>(n_exc);
        std::size_t quota_g = static_cast<std::size_t>(exact_g);
        std::size_t quota_e = static_cast<std::size_t>(exact_e);
        while (quota_g + quota_e < n_test) {
            const double rem_g = exact_g - static_cast<double>(quota_g);
            const double rem_e = exact_e - static_cast<double>(quota_e);
            if ((rem_g >= rem_e && quota_g < n_gnd) || quota_e >= n_exc)
                ++quota_g;
            else
                ++quota_e;
        }
        while (quota_g + quota_e > n_test) {
            if (quota_g > 0 && (quota_e == 0 || exact_g - static_cast<double>(quota_g) <= exact_e - static_cast<double>(quota_e)))
                --quota_g;
            else
                --quota_e;
        }
        std::size_t taken_g = 0;
        std::size_t taken_e = 0;
        for (std::size_t pos : order) {
            const bool excited = shots[pos].label == StateLabel::Excited;
            std::size_t& taken = excited ? taken_e : taken_g;
            const std::size_t quota = excited ? quota_e : quota_g;
            if (taken < quota) {
                test_idx.push_back(pos);
                ++taken;
            } else {
                train_idx.push_back(pos);
            }
        }
    }

    const auto& shots = data.shots();
    std::vector<LabeledShot> train_shots;
    std::vector<LabeledShot> test_shots;
    train_shots.reserve(train_idx.size());
    test_shots.reserve(test_idx.size());
    for (std::size_t pos : test_idx) test_shots.push_back(shots[pos]);
    for (std::size_t pos : train_idx) train_shots.push_back(shots[pos]);

    SplitDataset out;
    out.train = Dataset(std::move(train_shots), seed);
    out.test = Dataset(std::move(test_shots), seed);
    out.test_fraction = test_fraction;
    return out;
}

namespace {

double parse_double_field(std::string_view field, std::size_t row, const char* column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(row, column, "'" + std::string(field) + "' is not a number");
    if (!std::isfinite(value))
        throw NonFiniteValueError("row " + std::to_string(row) + ", column " + column + ": non-finite value");
    return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "header", "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,q,state") throw ParseError(1, "header", "expected 'i,q,state', got '" + line + "'");

    std::vector<LabeledShot> shots;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (in.eof()) break;
            throw ParseError(row, "i", "empty row");
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError(row, "state", "expected three comma-separated fields");
        if (line.find(',', c2 + 1) != std::string::npos)
            throw ParseError(row, "state", "too many fields");

        LabeledShot shot;
        shot.point.i = parse_double_field(std::string_view(line).substr(0, c1), row, "i");
        shot.point.q = parse_double_field(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), row, "q");
        const std::string_view state_field = std::string_view(line).substr(c2 + 1);
        if (state_field == "0")
            shot.label = StateLabel::Ground;
        else if (state_field == "1")
            shot.label = StateLabel::Excited;
        else
            throw ParseError(row, "state", "'" + std::string(state_field) + "' is not 0 or 1");
        shots.push_back(shot);
    }
    return Dataset(std::move(shots));
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "i,q,state\n";
    char buf[64];
    for (const auto& s : data.shots()) {
        std::snprintf(buf, sizeof buf, "%.17g", s.point.i);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", s.point.q);
        out << buf << ',' << to_int(s.label) << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace iqbench
