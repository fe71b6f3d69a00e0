#include "gaussnet/serialize.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace gaussnet {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string to_json(const GaussianState& state) {
    json j;
    j["n_modes"] = state.n_modes();
    std::vector<double> cm;
    cm.reserve(state.cm().size());
    for (int r = 0; r < state.cm().rows(); ++r)
        for (int c = 0; c < state.cm().cols(); ++c) cm.push_back(state.cm()(r, c));
    j["cm"] = std::move(cm);
    j["means"] = std::vector<double>(state.means().data(),
                                     state.means().data() + state.means().size());
    j["freqs"] = std::vector<double>(state.freqs().data(),
                                     state.freqs().data() + state.freqs().size());
    return j.dump();
}

GaussianState state_from_json(const std::string& text) {
    json j = json::parse(text);
    const int n = j.at("n_modes").get<int>();
    auto cm_flat = j.at("cm").get<std::vector<double>>();
    auto means = j.at("means").get<std::vector<double>>();
    auto freqs = j.at("freqs").get<std::vector<double>>();
    if (static_cast<int>(cm_flat.size()) != 4 * n * n)
        throw FormatError("state record: cm size mismatch");
    Eigen::MatrixXd cm(2 * n, 2 * n);
    for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < 2 * n; ++c) cm(r, c) = cm_flat[r * 2 * n + c];
    return GaussianState(cm, Eigen::Map<Eigen::VectorXd>(means.data(), means.size()),
                         Eigen::Map<Eigen::VectorXd>(freqs.data(), freqs.size()));
}

std::string transfer_result_csv_header() {
    return "sender,receiver,mode,kind,c,omega_res,g_eff,t_nominal,fidelity_best,t_best,"
           "fidelity_at_nominal,efficiency,efficiency_at_nominal,k_sender,k_receiver,"
           "degenerate,infeasible";
}

std::string to_csv_row(const TransferResult& r) {
    std::ostringstream ss;
    const double t_nominal =
        r.params.kind == ProtocolKind::two_step ? 2.0 * r.params.t_stage : r.params.t_stage;
    ss << r.sender_node << "," << r.receiver_node << "," << r.mode_index << ","
       << (r.params.kind == ProtocolKind::two_step ? "two_step" : "single_step") << ","
       << r.params.c << "," << fmt(r.params.omega_res) << "," << fmt(r.params.g_eff) << ","
       << fmt(t_nominal) << "," << fmt(r.fidelity_best) << "," << fmt(r.t_best) << ","
       << fmt(r.fidelity_at_nominal) << "," << fmt(r.efficiency) << ","
       << fmt(r.efficiency_at_nominal) << "," << fmt(r.metadata.k_sender) << ","
       << fmt(r.metadata.k_receiver) << "," << (r.metadata.degenerate ? 1 : 0) << ","
       << (r.metadata.infeasible ? 1 : 0);
    return ss.str();
}

std::string to_json(const TransferResult& r) {
    json j;
    j["sender"] = r.sender_node;
    j["receiver"] = r.receiver_node;
    j["mode"] = r.mode_index;
    j["kind"] = r.params.kind == ProtocolKind::two_step ? "two_step" : "single_step";
    j["c"] = r.params.c;
    j["omega_res"] = r.params.omega_res;
    j["g_eff"] = r.params.g_eff;
    j["t_stage"] = r.params.t_stage;
    j["fidelity_best"] = r.fidelity_best;
    j["t_best"] = r.t_best;
    j["fidelity_at_nominal"] = r.fidelity_at_nominal;
    j["efficiency"] = r.efficiency;
    j["efficiency_at_nominal"] = r.efficiency_at_nominal;
    j["k_sender"] = r.metadata.k_sender;
    j["k_receiver"] = r.metadata.k_receiver;
    j["degenerate"] = r.metadata.degenerate;
    j["infeasible"] = r.metadata.infeasible;
    if (!r.metadata.note.empty()) j["note"] = r.metadata.note;
    return j.dump();
}

}  // namespace gaussnet
