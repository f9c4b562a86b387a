#include "hienet/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hienet {

std::string mode_to_string(Mode m) {
    switch (m) {
        case Mode::Full: return "full";
        case Mode::NoPm: return "no_pm";
        case Mode::NoBhpe: return "no_bhpe";
        case Mode::NoPp: return "no_pp";
    }
    return "full";
}

Mode mode_from_string(const std::string& s) {
    if (s == "full") return Mode::Full;
    if (s == "no_pm") return Mode::NoPm;
    if (s == "no_bhpe") return Mode::NoBhpe;
    if (s == "no_pp") return Mode::NoPp;
    throw std::invalid_argument("unknown mode '" + s + "' (full|no_pm|no_bhpe|no_pp)");
}

void TrainConfig::validate() const {
    enc.validate();
    pm.validate();
    if (!(ppr.d > 0.0 && ppr.d < 1.0))
        throw std::invalid_argument("config: ppr_d must be in (0,1)");
    if (ppr.max_iters < 1) throw std::invalid_argument("config: ppr_max_iters must be >= 1");
    if (lr < 0.0) throw std::invalid_argument("config: lr must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (max_epochs < 0 || patience < 1)
        throw std::invalid_argument("config: epochs/patience invalid");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("config: dropout must be in [0,1)");
    if (bpr_max_epochs < 0 || bpr_stop <= 0.0 || bpr_lr < 0.0)
        throw std::invalid_argument("config: bpr settings invalid");
    if (stop_at_micro_f1 < 0.0 || stop_at_micro_f1 > 1.0)
        throw std::invalid_argument("config: stop_at_micro_f1 must be in [0,1]");
}

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream is(s);
    std::string cell;
    while (std::getline(is, cell, ',')) out.push_back(std::stoi(cell));
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("expected boolean, got '" + s + "'");
}

}  // namespace

TrainConfig parse_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    TrainConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "d_e") cfg.enc.d_e = std::stoi(value);
            else if (key == "d_c") cfg.enc.d_c = std::stoi(value);
            else if (key == "filter_sizes") cfg.enc.filter_sizes = parse_int_list(value);
            else if (key == "max_len") cfg.enc.max_len = std::stoi(value);
            else if (key == "dropout") cfg.dropout = std::stod(value);
            else if (key == "lr") cfg.lr = std::stod(value);
            else if (key == "batch_size") cfg.batch_size = std::stoi(value);
            else if (key == "max_epochs") cfg.max_epochs = std::stoi(value);
            else if (key == "patience") cfg.patience = std::stoi(value);
            else if (key == "ppr_d") cfg.ppr.d = std::stod(value);
            else if (key == "ppr_max_iters") cfg.ppr.max_iters = std::stoi(value);
            else if (key == "ppr_tol") cfg.ppr.tol = std::stod(value);
            else if (key == "ppr_iterate") cfg.ppr_iterate_mode = parse_bool(value);
            else if (key == "cooc_binarize") cfg.cooc_binarize = parse_bool(value);
            else if (key == "lambda") cfg.pm.lambda = std::stod(value);
            else if (key == "pm_rounds") cfg.pm.rounds = std::stoi(value);
            else if (key == "pm_tau") cfg.pm.tau = std::stod(value);
            else if (key == "pm_neighbors")
                cfg.pm.neighbor_source = neighbor_source_from_string(value);
            else if (key == "pm_train") cfg.pm.train_mode = parse_bool(value);
            else if (key == "mode") cfg.mode = mode_from_string(value);
            else if (key == "bpr_lr") cfg.bpr_lr = std::stod(value);
            else if (key == "bpr_max_epochs") cfg.bpr_max_epochs = std::stoi(value);
            else if (key == "bpr_stop") cfg.bpr_stop = std::stod(value);
            else if (key == "pos_n") cfg.pos_n = std::stoi(value);
            else if (key == "pos_k") cfg.pos_k = std::stoi(value);
            else if (key == "pos_trainable") cfg.pos_trainable = parse_bool(value);
            else if (key == "finetune_vt") cfg.finetune_vt = parse_bool(value);
            else if (key == "stop_at_micro_f1") cfg.stop_at_micro_f1 = std::stod(value);
            else throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& cfg) {
    auto fmt = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string filters;
    for (std::size_t i = 0; i < cfg.enc.filter_sizes.size(); ++i)
        filters += (i ? "," : "") + std::to_string(cfg.enc.filter_sizes[i]);
    return {
        {"seed", std::to_string(cfg.seed)},
        {"d_e", std::to_string(cfg.enc.d_e)},
        {"d_c", std::to_string(cfg.enc.d_c)},
        {"filter_sizes", filters},
        {"max_len", std::to_string(cfg.enc.max_len)},
        {"dropout", fmt(cfg.dropout)},
        {"lr", fmt(cfg.lr)},
        {"batch_size", std::to_string(cfg.batch_size)},
        {"max_epochs", std::to_string(cfg.max_epochs)},
        {"patience", std::to_string(cfg.patience)},
        {"ppr_d", fmt(cfg.ppr.d)},
        {"ppr_max_iters", std::to_string(cfg.ppr.max_iters)},
        {"ppr_tol", fmt(cfg.ppr.tol)},
        {"ppr_iterate", cfg.ppr_iterate_mode ? "true" : "false"},
        {"cooc_binarize", cfg.cooc_binarize ? "true" : "false"},
        {"lambda", fmt(cfg.pm.lambda)},
        {"pm_rounds", std::to_string(cfg.pm.rounds)},
        {"pm_tau", fmt(cfg.pm.tau)},
        {"pm_neighbors", neighbor_source_to_string(cfg.pm.neighbor_source)},
        {"pm_train", cfg.pm.train_mode ? "true" : "false"},
        {"mode", mode_to_string(cfg.mode)},
        {"bpr_lr", fmt(cfg.bpr_lr)},
        {"bpr_max_epochs", std::to_string(cfg.bpr_max_epochs)},
        {"bpr_stop", fmt(cfg.bpr_stop)},
        {"pos_n", std::to_string(cfg.pos_n)},
        {"pos_k", std::to_string(cfg.pos_k)},
        {"pos_trainable", cfg.pos_trainable ? "true" : "false"},
        {"finetune_vt", cfg.finetune_vt ? "true" : "false"},
        {"stop_at_micro_f1", fmt(cfg.stop_at_micro_f1)},
    };
}

void write_train_config(const std::string& path, const TrainConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    for (const auto& [k, v] : config_items(cfg)) out << k << " = " << v << "\n";
}

}  // namespace hienet
