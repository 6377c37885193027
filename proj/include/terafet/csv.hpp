#pragma once

#include <string>
#include <vector>

#include "terafet/engine.hpp"
#include "terafet/response.hpp"

namespace terafet {

// CSV schemas (decimal notation, 9 significant digits, UNIX newlines):
//   ResponseCurve:  frequency_hz,delta_u_v,method,flag
//   ChannelProfile: x_m,t_s,v_mps,n_per_m2
//   I-V table:      v_gs,v_ds,i_d
void emit_csv(const ResponseCurve& curve, const std::string& path);
void emit_csv(const ChannelProfile& profile, const std::string& path);
void emit_csv(const std::vector<IvPoint>& table, const std::string& path);

// Sidecar metadata written next to every artifact: scenario, method and a
// content hash of the config, so reruns are auditable.
void write_sidecar(const std::string& artifact_path, const std::string& scenario,
                   const std::string& method, const std::string& config_hash);

ResponseCurve read_response_csv(const std::string& path);
std::vector<IvPoint> read_iv_csv(const std::string& path);

std::string format_g9(double v); // %.9g

} // namespace terafet
