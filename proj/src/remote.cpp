// Copyright 2026 Chainlab Developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "chainlab/remote.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "chainlab/compile.hpp"
#include "httplib.h"
#include "json.hpp"

namespace chainlab {

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void protocol_error(const std::string& what) {
    throw RemoteError(RemoteErrorKind::Protocol, "remote: " + what);
}

nlohmann::json parse_body(const httplib::Result& res, const char* context) {
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        protocol_error(std::string(context) + ": response is not JSON (" + e.what() + ")");
    }
}

// Skeleton shared with the local backend so a faithful server round-trips to
// the identical SampleSet.
SampleSet skeleton(const PhysicalProblem& problem, const SamplerParams& params) {
    SampleSet out;
    out.provenance = problem.provenance;
    out.qubits = live_qubits(problem);
    out.total_qubits = problem.provenance.grid_size > 0
                           ? 8 * problem.provenance.grid_size * problem.provenance.grid_size
                           : (out.qubits.empty() ? 0 : out.qubits.back() + 1);
    out.params = params;
    return out;
}

}  // namespace

SampleSet remote_sample(const PhysicalProblem& problem, const SamplerParams& params,
                        const std::string& endpoint, const RemoteConfig& config) {
    const auto deadline = Clock::now() + std::chrono::milliseconds(config.timeout_ms);
    httplib::Client cli(endpoint);
    const int total_ms = std::max(1, config.timeout_ms);
    cli.set_connection_timeout(total_ms / 1000, (total_ms % 1000) * 1000);
    cli.set_read_timeout(total_ms / 1000 + 1, (total_ms % 1000) * 1000);

    nlohmann::json submission;
    submission["problem"] = nlohmann::json::parse(problem.to_json());
    submission["params"] = nlohmann::json::parse(params.to_json());

    const auto posted = cli.Post("/problems", submission.dump(), "application/json");
    if (!posted)
        throw RemoteError(RemoteErrorKind::Network,
                          "remote: cannot reach " + endpoint + ": " + httplib::to_string(posted.error()));
    if (posted->status == 400) {
        std::string message = posted->body;
        try {
            message = nlohmann::json::parse(posted->body).at("error").get<std::string>();
        } catch (const nlohmann::json::exception&) {
        }
        throw RemoteError(RemoteErrorKind::Rejected, "remote: submission rejected: " + message);
    }
    if (posted->status != 200)
        protocol_error("submission answered HTTP " + std::to_string(posted->status));
    std::string job_id;
    try {
        job_id = parse_body(posted, "submission").at("job_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        protocol_error(std::string("submission reply lacks job_id (") + e.what() + ")");
    }

    while (true) {
        if (Clock::now() >= deadline)
            throw RemoteError(RemoteErrorKind::Timeout,
                              "remote: no result for job " + job_id + " within " +
                                  std::to_string(config.timeout_ms) + " ms");
        const auto res = cli.Get("/jobs/" + job_id);
        if (!res)
            throw RemoteError(RemoteErrorKind::Network,
                              "remote: lost " + endpoint + ": " + httplib::to_string(res.error()));
        if (res->status != 200)
            protocol_error("job poll answered HTTP " + std::to_string(res->status));
        const nlohmann::json body = parse_body(res, "job poll");

        std::string status;
        try {
            status = body.at("status").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            protocol_error(std::string("job poll lacks status (") + e.what() + ")");
        }
        if (status == "pending") {
            std::this_thread::sleep_for(std::chrono::milliseconds(config.poll_interval_ms));
            continue;
        }
        if (status != "done") protocol_error("unknown job status \"" + status + "\"");

        SampleSet out = skeleton(problem, params);
        try {
            const auto& rows = body.at("samples");
            for (const auto& row : rows) {
                if (row.size() != out.qubits.size())
                    protocol_error("sample width does not match the problem");
                SpinVector s;
                s.reserve(row.size());
                for (const auto& v : row) {
                    const int spin = v.get<int>();
                    if (spin != 1 && spin != -1) protocol_error("sample entries must be +-1");
                    s.push_back(static_cast<Spin>(spin));
                }
                out.samples.push_back(std::move(s));
            }
            out.energies = body.at("energies").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            protocol_error(std::string("malformed result payload (") + e.what() + ")");
        }
        if (out.samples.size() != static_cast<std::size_t>(params.num_reads) ||
            out.energies.size() != out.samples.size())
            protocol_error("result size does not match num_reads");
        for (std::size_t r = 0; r < out.samples.size(); ++r) {
            const double direct = physical_energy(problem, out.full(r));
            if (std::abs(out.energies[r] - direct) > 1e-9 * std::max(1.0, std::abs(direct)))
                protocol_error("server energies disagree with recomputation from the problem");
            out.streams.push_back(static_cast<std::uint64_t>(r));
        }
        return out;
    }
}

struct StubServer::Impl {
    httplib::Server server;
    std::thread worker;
    int port = 0;
    int pending_polls = 0;

    std::mutex mutex;
    std::map<std::string, std::pair<SampleSet, int>> jobs;  // id -> (result, polls left)
    int next_id = 0;

    static void reply_error(httplib::Response& res, int status, const std::string& message) {
        nlohmann::json body;
        body["error"] = message;
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    // nothing outside the programmable window may reach the solver
    static std::string range_violation(const PhysicalProblem& p) {
        const double r = p.rescale_factor;
        for (const auto& [q, v] : p.h)
            if (std::abs(r * v) > 2.0 + 1e-12)
                return "field on qubit " + std::to_string(q) + " programs to " +
                       std::to_string(r * v) + ", outside |h| <= 2";
        for (const auto& [a, b, v] : p.j)
            if (std::abs(r * v) > 1.0 + 1e-12)
                return "coupler (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") programs to " + std::to_string(r * v) + ", outside |J| <= 1";
        if (!p.chain_couplers.empty() && (r * p.lambda > 2.0 + 1e-12 || p.lambda < 0.0))
            return "chain couplers program to " + std::to_string(-r * p.lambda) +
                   ", outside [-2, 0]";
        return {};
    }

    void handle_submit(const httplib::Request& req, httplib::Response& res) {
        PhysicalProblem problem;
        SamplerParams params;
        try {
            const auto body = nlohmann::json::parse(req.body);
            problem = PhysicalProblem::from_json(body.at("problem").dump());
            params = SamplerParams::from_json(body.at("params").dump());
        } catch (const std::exception& e) {
            reply_error(res, 400, std::string("malformed submission: ") + e.what());
            return;
        }
        if (const std::string why = range_violation(problem); !why.empty()) {
            reply_error(res, 400, why);
            return;
        }
        SampleSet set;
        try {
            set = sample(problem, params);
        } catch (const std::exception& e) {
            reply_error(res, 400, std::string("solver refused the problem: ") + e.what());
            return;
        }
        std::string id;
        {
            std::lock_guard<std::mutex> lock(mutex);
            id = "job" + std::to_string(next_id++);
            jobs.emplace(id, std::make_pair(std::move(set), pending_polls));
        }
        nlohmann::json body;
        body["job_id"] = id;
        res.set_content(body.dump(), "application/json");
    }

    void handle_poll(const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(mutex);
        const auto it = jobs.find(req.matches[1].str());
        if (it == jobs.end()) {
            reply_error(res, 404, "unknown job");
            return;
        }
        nlohmann::json body;
        if (it->second.second > 0) {
            --it->second.second;
            body["status"] = "pending";
        } else {
            const SampleSet& set = it->second.first;
            body["status"] = "done";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& s : set.samples) {
                nlohmann::json row = nlohmann::json::array();
                for (Spin v : s) row.push_back(static_cast<int>(v));
                rows.push_back(std::move(row));
            }
            body["samples"] = std::move(rows);
            body["energies"] = set.energies;
        }
        res.set_content(body.dump(), "application/json");
    }
};

StubServer::StubServer(int pending_polls) : impl_(std::make_unique<Impl>()) {
    impl_->pending_polls = pending_polls;
    impl_->server.Post("/problems", [impl = impl_.get()](const httplib::Request& req,
                                                         httplib::Response& res) {
        impl->handle_submit(req, res);
    });
    impl_->server.Get(R"(/jobs/(\w+))", [impl = impl_.get()](const httplib::Request& req,
                                                             httplib::Response& res) {
        impl->handle_poll(req, res);
    });
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) throw std::runtime_error("stub server: cannot bind a loopback port");
    impl_->worker = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
    for (int spin = 0; spin < 5000 && !impl_->server.is_running(); ++spin)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    if (!impl_->server.is_running()) {
        impl_->server.stop();
        if (impl_->worker.joinable()) impl_->worker.join();
        throw std::runtime_error("stub server: listener did not come up");
    }
}

StubServer::~StubServer() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int StubServer::port() const { return impl_->port; }

std::string StubServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace chainlab
