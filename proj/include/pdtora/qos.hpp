#ifndef PDTORA_QOS_HPP
#define PDTORA_QOS_HPP

#include <optional>
#include <span>
#include <variant>

#include "pdtora/types.hpp"

namespace pdtora {

/// Per-flow QoS request carried by a query: minimum residual power as a
/// fraction of initial charge, and maximum end-to-end delay.
struct QosConstraint
{
    double min_power_fraction = 0.2;
    TimeMs max_delay_ms = 250.0;

    bool operator==(const QosConstraint &) const = default;
};

struct Admit
{
    TimeMs remaining_budget_ms;
};
struct RejectPower
{
};
struct RejectDelay
{
};

using AdmissionResult = std::variant<Admit, RejectPower, RejectDelay>;

/// Query admission at an intermediate node. Power is checked first; a
/// residual exactly at the threshold is admitted. est_delay_to_dst_ms is
/// the node's cached delay to the destination when it already holds a route.
AdmissionResult admit_query(double residual_fraction, TimeMs budget_ms, TimeMs ntt_ms, const QosConstraint &qos,
                            std::optional<TimeMs> est_delay_to_dst_ms);

/// Exponentially weighted node traverse time estimate, seeded with the
/// configured static value.
class NttEstimator
{
public:
    explicit NttEstimator(TimeMs static_ms = 10.0, double alpha = 0.0);

    void observe(TimeMs delay_ms);
    TimeMs current() const { return m_estimate; }
    bool adaptive() const { return m_alpha > 0.0; }

private:
    TimeMs m_estimate;
    double m_alpha;
};

/// EWMA over a whole sample sequence; returns static_ms for an empty one.
TimeMs estimate_ntt(std::span<const TimeMs> observed, double alpha, TimeMs static_ms);

enum class MetricKind { Additive, Concave, Multiplicative };

/// Path metric from per-link values: sum, min or product by kind.
/// Throws std::invalid_argument on an empty sequence.
double compose_metric(MetricKind kind, std::span<const double> per_link_values);

} // namespace pdtora

#endif
