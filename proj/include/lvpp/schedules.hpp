#pragma once

#include <span>
#include <string>
#include <variant>

namespace lvpp {

namespace schedule {

struct Fixed {
    double alpha = 1.0;
};
// alpha_k = C k (k+1) ... (k+m)
struct Arithmetic {
    double C = 1.0;
    int m = 0;
};
// alpha_k = C mu^(k-1)
struct Geometric {
    double C = 1.0;
    double mu = 2.0;
};
// alpha_1 = C, alpha_k = C (k-1) (k-1)!
struct Factorial {
    double C = 1.0;
};
// alpha_k = S_k - S_(k-1) with partial sums S_k = r^(1/(q-1)) mu^(q^(k-1)).
// mu <= 0 selects mu = r.
struct DoubleExp {
    double r = 1.5;
    double q = 1.5;
    double mu = 0.0;
    double cap = 1e10;
};
// alpha_1 = floor, alpha_k = min(max(floor, r^(q^(k-1)) - alpha_(k-1)), cap)
struct PaperDoubleExp {
    double r = 1.5;
    double q = 1.5;
    double floor = 1.0;
    double cap = 1e10;
};

} // namespace schedule

using ScheduleSpec = std::variant<schedule::Fixed, schedule::Arithmetic, schedule::Geometric,
                                  schedule::Factorial, schedule::DoubleExp,
                                  schedule::PaperDoubleExp>;

class StepSchedule {
public:
    explicit StepSchedule(ScheduleSpec spec);

    // Parses "fixed:1.0", "geo:2.0", "arith:1:0", "fact:1.0", "dexp:1.5,1.5",
    // "dexpc:r,q[,mu]" (telescoping variant). Throws ConfigError.
    static StepSchedule parse(const std::string& text);

    double next_alpha();
    int iteration() const { return k_; }
    double previous() const { return prev_; }
    void reset();
    const ScheduleSpec& spec() const { return spec_; }
    std::string describe() const;

private:
    ScheduleSpec spec_;
    int k_ = 0;
    double prev_ = 0.0;
};

// Closed-form partial sum of the first k step sizes (caps ignored).
double partial_sum(const ScheduleSpec& spec, int k);

// eps_(k+1)/eps_k with eps_k = 1/partial_sum(k); for DoubleExp eps_(k+1)/eps_k^q.
double theoretical_error_ratio(const ScheduleSpec& spec, int k);

struct OrderClass {
    enum class Kind { Sublinear, Linear, Superlinear };
    Kind kind = Kind::Sublinear;
    double order = 1.0;
    double rate = 1.0;
};

// Ratios are eps_(k+1)/eps_k^q. With q == 1 the limiting ratio decides between
// sublinear (-> 1) and linear (< 1); q > 1 reports superlinear with that order.
OrderClass classify_order(std::span<const double> ratios, double q = 1.0);

} // namespace lvpp
