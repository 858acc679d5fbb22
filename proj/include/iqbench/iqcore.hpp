#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "iqbench/errors.hpp"

namespace iqbench {

// One demodulated readout shot projected onto the IQ plane.
struct IQPoint {
    double i = 0.0;
    double q = 0.0;

    bool finite() const;
    friend bool operator==(const IQPoint&, const IQPoint&) = default;
};

// Serialized as 0 (ground) / 1 (excited).
enum class StateLabel : std::uint8_t { Ground = 0, Excited = 1 };

inline int to_int(StateLabel s) { return s == StateLabel::Excited ? 1 : 0; }
StateLabel label_from_int(int v);  // throws ParseError-free Error on values outside {0,1}

struct LabeledShot {
    IQPoint point;
    StateLabel label = StateLabel::Ground;
    friend bool operator==(const LabeledShot&, const LabeledShot&) = default;
};

// Ordered collection of labeled shots. Immutable after construction; safe to
// share read-only across threads.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<LabeledShot> shots, std::uint64_t seed = 0);

    const std::vector<LabeledShot>& shots() const { return shots_; }
    std::size_t size() const { return shots_.size(); }
    bool empty() const { return shots_.empty(); }
    std::uint64_t seed() const { return seed_; }

    std::size_t count(StateLabel label) const {
        return label == StateLabel::Excited ? count_excited_ : shots_.size() - count_excited_;
    }

    // Training operations call this before consuming the data.
    void require_both_classes() const;

private:
    std::vector<LabeledShot> shots_;
    std::uint64_t seed_ = 0;
    std::size_t count_excited_ = 0;
};

struct SplitDataset {
    Dataset train;
    Dataset test;
    double test_fraction = 0.0;
};

// Deterministic uniform shuffle split; |test| == round(test_fraction * N).
// With stratified=true the test quota is distributed across classes by
// largest remainder, keeping the same total.
SplitDataset split(const Dataset& data, double test_fraction, std::uint64_t seed, bool stratified = false);

// CSV interchange: header "i,q,state", UTF-8, LF line endings, one shot per
// row. Floats are written with 17 significant digits so save/load round-trips
// doubles exactly.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace iqbench
