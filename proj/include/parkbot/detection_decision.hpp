#pragma once
//
// Per-frame trash probability -> 0.5 binarization -> 10-frame moving average
// -> pickup trigger.
//

#include <array>
#include <cstddef>

#include "parkbot/random.hpp"

namespace parkbot {

// What a frame classifier is allowed to know about the current camera frame.
struct FrameContext {
    bool trash_present = false;
    double t = 0.0;
};

// Any provider mapping a frame to a trash probability in [0, 1].
class FrameClassifier {
public:
    virtual ~FrameClassifier() = default;
    virtual double classify(const FrameContext& frame) = 0;
};

struct ClassifierStub {
    double p_hit = 0.0;    // P(prob >= 0.5 | trash in zone)
    double p_false = 0.01; // P(prob >= 0.5 | empty grass)

    bool valid() const { return 0.0 <= p_false && p_false <= p_hit && p_hit <= 1.0; }
};

// One uniform draw u: positive iff u < p, and the returned probability is
// u rescaled into [0.5, 1] or [0, 0.5) accordingly.
double classify_frame(const ClassifierStub& stub, bool trash_present, Rng& rng);

class StubClassifier final : public FrameClassifier {
public:
    StubClassifier(const ClassifierStub& stub, Rng rng) : stub_(stub), rng_(std::move(rng)) {}
    double classify(const FrameContext& frame) override { return classify_frame(stub_, frame.trash_present, rng_); }

private:
    ClassifierStub stub_;
    Rng rng_;
};

enum class TriggerComparison { AtLeast, StrictlyGreater };

inline constexpr std::size_t kWindowSize = 10;

class DecisionWindow {
public:
    struct Params {
        double infer_threshold = 0.5;
        double trigger_threshold = 0.9;
        TriggerComparison comparison = TriggerComparison::AtLeast;
    };

    DecisionWindow() = default;
    explicit DecisionWindow(const Params& params) : params_(params) {}

    // Pushes one binarized prediction; returns true (and clears) on trigger.
    bool push(double frame_prob);
    void clear();

    std::size_t size() const { return count_; }
    int positives() const { return positives_; }
    double mean() const { return count_ ? static_cast<double>(positives_) / static_cast<double>(count_) : 0.0; }
    const Params& params() const { return params_; }

private:
    Params params_;
    std::array<bool, kWindowSize> ring_{};
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    int positives_ = 0;
};

inline bool update_window(DecisionWindow& win, double frame_prob) { return win.push(frame_prob); }

}  // namespace parkbot
