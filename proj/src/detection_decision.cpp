#include "parkbot/detection_decision.hpp"

namespace parkbot {

double classify_frame(const ClassifierStub& stub, bool trash_present, Rng& rng) {
    const double p = trash_present ? stub.p_hit : stub.p_false;
    const double u = rng.uniform();
    if (u < p) return 0.5 + 0.5 * (u / p);            // [0.5, 1)
    return 0.5 * (u - p) / (1.0 - p);                 // [0, 0.5)
}

bool DecisionWindow::push(double frame_prob) {
    const bool positive = frame_prob >= params_.infer_threshold;
    if (count_ == kWindowSize) {
        positives_ -= ring_[head_];
    } else {
        ++count_;
    }
    ring_[head_] = positive;
    positives_ += positive;
    head_ = (head_ + 1) % kWindowSize;

    if (count_ < kWindowSize) return false;
    // Compare on counts to avoid 9/10 landing a hair under 0.9.
    const double needed = params_.trigger_threshold * static_cast<double>(kWindowSize);
    const double have = static_cast<double>(positives_);
    const bool trigger = params_.comparison == TriggerComparison::AtLeast ? have >= needed - 1e-9
                                                                          : have > needed + 1e-9;
    if (trigger) clear();
    return trigger;
}

void DecisionWindow::clear() {
    ring_.fill(false);
    head_ = 0;
    count_ = 0;
    positives_ = 0;
}

}  // namespace parkbot
