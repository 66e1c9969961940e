// Copyright 2026 The Mindroom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace mindroom {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StoreClosed : public Error {
public:
    StoreClosed() : Error("context store is closed") {}
};

class InvalidEntry : public Error {
public:
    using Error::Error;
};

class UnknownAgent : public Error {
public:
    explicit UnknownAgent(const std::string& id) : Error("unknown agent: " + id), agent_id(id) {}
    std::string agent_id;
};

class UnknownReferral : public Error {
public:
    explicit UnknownReferral(const std::string& id) : Error("referral names unregistered agent: " + id) {}
};

// Config or flag values that violate a documented invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

// Backend output that does not match the expected key/value schema, after re-asking.
class MalformedOutput : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Failures raised by chat backends. Subclasses distinguish transport problems,
/// provider throttling and cassette misses so callers can decide whether to retry.
class BackendError : public Error {
public:
    using Error::Error;
};

class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

class RateLimited : public BackendError {
public:
    using BackendError::BackendError;
};

class CassetteMiss : public BackendError {
public:
    explicit CassetteMiss(const std::string& key) : BackendError("no cassette entry for request key " + key), request_key(key) {}
    std::string request_key;
};

}  // namespace mindroom
