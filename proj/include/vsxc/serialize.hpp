#pragma once

#include <string>
#include <vector>

#include "vsxc/cluster_lstm.hpp"
#include "vsxc/ga.hpp"
#include "vsxc/gbt.hpp"
#include "vsxc/pipeline.hpp"
#include "vsxc/segsigmoid.hpp"
#include "vsxc/vmd.hpp"

// JSON text I/O for models, reports and configuration. Every dump_* output
// is deterministic for identical inputs (fixed key order, shortest
// round-trip number formatting).
namespace vsxc {

[[nodiscard]] std::string dump_json(const SegSigmoidModel& m);
[[nodiscard]] std::string dump_json(const TrendFitReport& r);
[[nodiscard]] SegSigmoidModel segsigmoid_from_json(const std::string& text);

[[nodiscard]] std::string dump_json(const GbtModel& m);
[[nodiscard]] GbtModel gbt_from_json(const std::string& text);

[[nodiscard]] std::string dump_json(const ClusterLstmModel& m);
[[nodiscard]] ClusterLstmModel clusterlstm_from_json(const std::string& text);

[[nodiscard]] std::string dump_json(const GaResult& r);
[[nodiscard]] std::string dump_json(const std::vector<Diagnostic>& diagnostics);
[[nodiscard]] std::string vmd_summary_json(const Decomposition& d, double alpha, double tau);

/// Full report including the configuration echo and stage timings.
[[nodiscard]] std::string dump_json(const ForecastReport& r, const PipelineConfig& cfg);
/// Metrics table only; no timings, so identical seeds give identical bytes.
[[nodiscard]] std::string dump_json(const AblationReport& r, const PipelineConfig& cfg);
[[nodiscard]] std::string dump_json(const std::vector<RollingFold>& folds);
[[nodiscard]] std::string dump_json(const MetricsReport& m);

[[nodiscard]] std::string dump_json(const PipelineConfig& cfg);
/// Overlays the keys present in `text` on `base`. Unknown keys are an error.
[[nodiscard]] PipelineConfig config_from_json(const std::string& text, PipelineConfig base = {});

}  // namespace vsxc
