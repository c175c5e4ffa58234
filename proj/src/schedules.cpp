#include "lvpp/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "lvpp/error.hpp"

namespace lvpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double dexp_mu(const schedule::DoubleExp& d) { return d.mu > 0.0 ? d.mu : d.r; }

double dexp_partial(const schedule::DoubleExp& d, int k) {
    if (k <= 0) return 0.0;
    return std::pow(d.r, 1.0 / (d.q - 1.0)) * std::pow(dexp_mu(d), std::pow(d.q, k - 1));
}

void validate(const ScheduleSpec& spec) {
    std::visit(overloaded{
                   [](const schedule::Fixed& s) {
                       if (!(s.alpha > 0)) throw ConfigError("fixed schedule needs alpha > 0");
                   },
                   [](const schedule::Arithmetic& s) {
                       if (!(s.C > 0) || s.m < 0) throw ConfigError("arith schedule needs C > 0, m >= 0");
                   },
                   [](const schedule::Geometric& s) {
                       if (!(s.C > 0) || !(s.mu > 1)) throw ConfigError("geo schedule needs C > 0, mu > 1");
                   },
                   [](const schedule::Factorial& s) {
                       if (!(s.C > 0)) throw ConfigError("fact schedule needs C > 0");
                   },
                   [](const schedule::DoubleExp& s) {
                       if (!(s.r > 1) || !(s.q > 1) || !(s.cap > 0))
                           throw ConfigError("dexp schedule needs r > 1, q > 1, cap > 0");
                       if (s.mu != 0.0 && !(s.mu > 1)) throw ConfigError("dexp schedule needs mu > 1");
                   },
                   [](const schedule::PaperDoubleExp& s) {
                       if (!(s.r > 1) || !(s.q > 1) || !(s.floor > 0) || !(s.cap >= s.floor))
                           throw ConfigError("dexp schedule needs r > 1, q > 1, 0 < floor <= cap");
                   },
               },
               spec);
}

std::vector<double> split_numbers(const std::string& s, const std::string& seps) {
    std::vector<double> out;
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) throw ConfigError("empty number in schedule '" + s + "'");
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + tok + "' in schedule");
        }
        if (pos != tok.size()) throw ConfigError("bad number '" + tok + "' in schedule");
        out.push_back(v);
        tok.clear();
    };
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            flush();
        } else {
            tok += c;
        }
    }
    flush();
    return out;
}

} // namespace

StepSchedule::StepSchedule(ScheduleSpec spec) : spec_(std::move(spec)) { validate(spec_); }

StepSchedule StepSchedule::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("schedule '" + text + "' lacks ':'");
    const std::string name = text.substr(0, colon);
    const auto v = split_numbers(text.substr(colon + 1), ",:");
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (v.size() < lo || v.size() > hi)
            throw ConfigError("schedule '" + text + "' has the wrong number of parameters");
    };
    if (name == "fixed") {
        need(1, 1);
        return StepSchedule(schedule::Fixed{v[0]});
    }
    if (name == "geo") {
        need(1, 2);
        return v.size() == 1 ? StepSchedule(schedule::Geometric{1.0, v[0]})
                             : StepSchedule(schedule::Geometric{v[0], v[1]});
    }
    if (name == "arith") {
        need(1, 2);
        const double m = v.size() == 2 ? v[1] : 0.0;
        if (m != std::floor(m)) throw ConfigError("arith: m must be an integer");
        return StepSchedule(schedule::Arithmetic{v[0], static_cast<int>(m)});
    }
    if (name == "fact") {
        need(1, 1);
        return StepSchedule(schedule::Factorial{v[0]});
    }
    if (name == "dexp") {
        need(2, 4);
        schedule::PaperDoubleExp s{v[0], v[1]};
        if (v.size() > 2) s.floor = v[2];
        if (v.size() > 3) s.cap = v[3];
        return StepSchedule(s);
    }
    if (name == "dexpc") {
        need(2, 4);
        schedule::DoubleExp s{v[0], v[1]};
        if (v.size() > 2) s.mu = v[2];
        if (v.size() > 3) s.cap = v[3];
        return StepSchedule(s);
    }
    throw ConfigError("unknown schedule '" + name + "'");
}

void StepSchedule::reset() {
    k_ = 0;
    prev_ = 0.0;
}

double StepSchedule::next_alpha() {
    const int k = ++k_;
    const double a = std::visit(
        overloaded{
            [](const schedule::Fixed& s) { return s.alpha; },
            [k](const schedule::Arithmetic& s) {
                double a = s.C;
                for (int j = 0; j <= s.m; ++j) a *= (k + j);
                return a;
            },
            [k](const schedule::Geometric& s) { return s.C * std::pow(s.mu, k - 1); },
            [k](const schedule::Factorial& s) {
                if (k == 1) return s.C;
                return s.C * (k - 1) * std::tgamma(static_cast<double>(k));
            },
            [k](const schedule::DoubleExp& s) {
                const double d = dexp_partial(s, k) - dexp_partial(s, k - 1);
                // inf - inf once the partial sums overflow
                return std::isfinite(d) ? std::min(d, s.cap) : s.cap;
            },
            [this, k](const schedule::PaperDoubleExp& s) {
                if (k == 1) return s.floor;
                const double raw = std::pow(s.r, std::pow(s.q, k - 1)) - prev_;
                return std::min(std::max(s.floor, raw), s.cap);
            },
        },
        spec_);
    prev_ = a;
    return a;
}

std::string StepSchedule::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const schedule::Fixed& s) { os << "fixed:" << s.alpha; },
                   [&](const schedule::Arithmetic& s) { os << "arith:" << s.C << ":" << s.m; },
                   [&](const schedule::Geometric& s) { os << "geo:" << s.C << "," << s.mu; },
                   [&](const schedule::Factorial& s) { os << "fact:" << s.C; },
                   [&](const schedule::DoubleExp& s) {
                       os << "dexpc:" << s.r << "," << s.q << "," << dexp_mu(s) << "," << s.cap;
                   },
                   [&](const schedule::PaperDoubleExp& s) {
                       os << "dexp:" << s.r << "," << s.q << "," << s.floor << "," << s.cap;
                   },
               },
               spec_);
    return os.str();
}

double partial_sum(const ScheduleSpec& spec, int k) {
    if (k < 0) throw ConfigError("partial_sum: k must be nonnegative");
    return std::visit(
        overloaded{
            [k](const schedule::Fixed& s) { return s.alpha * k; },
            [k](const schedule::Arithmetic& s) {
                // hockey stick: (m+2) sum_j j(j+1)...(j+m) = k(k+1)...(k+m+1)
                double p = s.C / (s.m + 2);
                for (int j = 0; j <= s.m + 1; ++j) p *= (k + j);
                return p;
            },
            [k](const schedule::Geometric& s) {
                return s.C * (std::pow(s.mu, k) - 1.0) / (s.mu - 1.0);
            },
            [k](const schedule::Factorial& s) {
                return k == 0 ? 0.0 : s.C * std::tgamma(static_cast<double>(k) + 1.0);
            },
            [k](const schedule::DoubleExp& s) { return dexp_partial(s, k); },
            [](const schedule::PaperDoubleExp&) -> double {
                throw ConfigError("partial_sum: no closed form for the practical double-exponential rule");
            },
        },
        spec);
}

double theoretical_error_ratio(const ScheduleSpec& spec, int k) {
    if (k < 1) throw ConfigError("theoretical_error_ratio: k must be >= 1");
    return std::visit(
        overloaded{
            [k](const schedule::Fixed&) { return static_cast<double>(k) / (k + 1); },
            [k](const schedule::Arithmetic& s) { return static_cast<double>(k) / (k + s.m + 2); },
            [k](const schedule::Geometric& s) {
                return (std::pow(s.mu, k) - 1.0) / (std::pow(s.mu, k + 1) - 1.0);
            },
            [k](const schedule::Factorial&) { return 1.0 / (k + 1); },
            [k](const schedule::DoubleExp& s) {
                // S_k^q / S_(k+1) = r^(q/(q-1)) mu^(q^k) / (r^(1/(q-1)) mu^(q^k)) = r for every k
                (void)k;
                return s.r;
            },
            [](const schedule::PaperDoubleExp&) -> double {
                throw ConfigError("theoretical_error_ratio: unsupported for the practical double-exponential rule");
            },
        },
        spec);
}

OrderClass classify_order(std::span<const double> ratios, double q) {
    if (ratios.size() < 5) throw ConfigError("classify_order: need at least 5 ratios");
    // limiting value from the tail (last three samples)
    const std::size_t n = ratios.size();
    const double tail = (ratios[n - 1] + ratios[n - 2] + ratios[n - 3]) / 3.0;
    OrderClass out;
    if (q > 1.0 + 1e-12) {
        out.kind = OrderClass::Kind::Superlinear;
        out.order = q;
        out.rate = tail;
        return out;
    }
    if (std::abs(tail - 1.0) <= 0.05) {
        out.kind = OrderClass::Kind::Sublinear;
        out.rate = 1.0;
    } else if (tail < 1e-3 || (ratios[n - 1] < ratios[n - 2] && ratios[n - 2] < ratios[n - 3] &&
                               ratios[n - 1] < 0.5 * ratios[n - 3])) {
        out.kind = OrderClass::Kind::Superlinear;
        out.order = 1.0;
        out.rate = 0.0;
    } else {
        out.kind = OrderClass::Kind::Linear;
        out.rate = tail;
    }
    return out;
}

} // namespace lvpp
