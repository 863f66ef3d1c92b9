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

#pragma once
#include <memory>
#include <stdexcept>
#include <string>

#include "chainlab/sampler.hpp"

namespace chainlab {

// Submit-and-poll client for a remote solver speaking the JSON wire format:
//   POST /problems  {"problem": ..., "params": ...}  ->  {"job_id": "..."}
//   GET  /jobs/<id>  ->  {"status": "pending"}
//                     |  {"status": "done", "samples": [[+-1,...]], "energies": [...]}
//   rejected submissions answer 400 with {"error": "..."}
// The sample matrix is returned over the problem's live qubits in ascending
// id order; everything else in the SampleSet (provenance, params echo, stream
// ids) is reconstructed client side, so a faithful server yields a
// byte-identical set to the local backend.

enum class RemoteErrorKind { Network, Protocol, Timeout, Rejected };

class RemoteError : public std::runtime_error {
public:
    RemoteError(RemoteErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    RemoteErrorKind kind() const { return kind_; }

private:
    RemoteErrorKind kind_;
};

struct RemoteConfig {
    int timeout_ms = 30000;      // total deadline across submit and polling
    int poll_interval_ms = 25;
};

// Blocking submit + poll. Throws RemoteError; never returns a partial set.
SampleSet remote_sample(const PhysicalProblem& problem, const SamplerParams& params,
                        const std::string& endpoint, const RemoteConfig& config = {});

// Loopback solver running the local backend, for tests and `serve`. Binds an
// ephemeral 127.0.0.1 port and serves from a background thread until
// destroyed. Submissions are validated against the programmable ranges
// (|R*J| <= 1, |R*h| <= 2, R*lambda <= 2) and rejected otherwise. A positive
// `pending_polls` makes each job report "pending" that many times first, to
// exercise client-side timeouts.
class StubServer {
public:
    explicit StubServer(int pending_polls = 0);
    ~StubServer();
    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    int port() const;
    std::string endpoint() const;  // "http://127.0.0.1:<port>"

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace chainlab
