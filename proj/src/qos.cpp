#include "pdtora/qos.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace pdtora {

AdmissionResult admit_query(double residual_fraction, TimeMs budget_ms, TimeMs ntt_ms, const QosConstraint &qos,
                            std::optional<TimeMs> est_delay_to_dst_ms)
{
    if (residual_fraction < qos.min_power_fraction)
        return RejectPower{};
    if (est_delay_to_dst_ms && *est_delay_to_dst_ms > budget_ms)
        return RejectDelay{};
    if (ntt_ms > budget_ms)
        return RejectDelay{};
    return Admit{budget_ms - ntt_ms};
}

NttEstimator::NttEstimator(TimeMs static_ms, double alpha) : m_estimate(static_ms), m_alpha(alpha)
{
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("ntt alpha must lie in [0,1]");
}

void NttEstimator::observe(TimeMs delay_ms)
{
    if (m_alpha > 0.0)
        m_estimate = m_alpha * delay_ms + (1.0 - m_alpha) * m_estimate;
}

TimeMs estimate_ntt(std::span<const TimeMs> observed, double alpha, TimeMs static_ms)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ntt alpha must lie in (0,1]");
    NttEstimator est(static_ms, alpha);
    for (TimeMs d : observed)
        est.observe(d);
    return est.current();
}

double compose_metric(MetricKind kind, std::span<const double> v)
{
    if (v.empty())
        throw std::invalid_argument("compose_metric: empty path");
    switch (kind) {
    case MetricKind::Additive:
        return std::accumulate(v.begin(), v.end(), 0.0);
    case MetricKind::Concave:
        return *std::min_element(v.begin(), v.end());
    case MetricKind::Multiplicative:
        return std::accumulate(v.begin(), v.end(), 1.0, std::multiplies<>());
    }
    throw std::invalid_argument("compose_metric: bad kind");
}

} // namespace pdtora
