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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mindroom/persona.hpp"

namespace mindroom {

enum class EntryType { Dialogue, Memory, Inference, RoleSetting, Action };

std::string_view to_string(EntryType type);
std::optional<EntryType> parse_entry_type(std::string_view text);

struct AgentScope {
    AgentId agent;
    bool operator==(const AgentScope&) const = default;
};

// A named discussion group. The member set is snapshotted into the entry so a session log is
// self-describing; queries match on the group key.
struct GroupScope {
    std::string key;
    std::set<AgentId> members;
    bool operator==(const GroupScope&) const = default;
};

struct ClassroomScope {
    bool operator==(const ClassroomScope&) const = default;
};

using VisibilityRange = std::variant<AgentScope, GroupScope, ClassroomScope>;

inline VisibilityRange agent_scope(AgentId id) { return AgentScope{std::move(id)}; }
inline VisibilityRange group_scope(std::string key, std::set<AgentId> members) {
    return GroupScope{std::move(key), std::move(members)};
}
inline VisibilityRange classroom_scope() { return ClassroomScope{}; }

using GroupKeys = std::set<std::string>;

struct ContextEntry {
    std::uint64_t pk = 0;
    std::string ctx;
    VisibilityRange range = ClassroomScope{};
    std::optional<AgentId> role_snapshot;
    EntryType entry_type = EntryType::Dialogue;
    std::uint64_t timestamp = 0;

    bool operator==(const ContextEntry&) const = default;
};

// Classroom entries are visible to everyone, Agent entries to that agent only, Group entries to
// callers that both list the group key among their memberships and appear in its member set.
bool visible_to(const ContextEntry& entry, const AgentId& agent, const GroupKeys& groups);

struct MemoryRecord {
    AgentId owner;
    std::string summary;
    int turn = 1;

    bool operator==(const MemoryRecord&) const = default;
};

/// Append-only, timestamp-ordered context database for one session.
///
/// Every record carries a visibility range; agents only ever see classroom-wide entries,
/// entries scoped to themselves, and entries of groups they belong to. Role settings and
/// per-agent memory live in the same table (as RoleSetting and Memory entries scoped to the
/// owning agent).
///
/// Appends are serialized; queries take a shared lock and observe a consistent snapshot.
class ContextStore {
public:
    ContextStore() = default;
    ContextStore(const ContextStore&) = delete;
    ContextStore& operator=(const ContextStore&) = delete;

    /// Appends a record and returns its pk. Throws StoreClosed after close(), InvalidEntry when
    /// a RoleSetting lacks role_snapshot or a group range has no members.
    std::uint64_t append(std::string ctx, VisibilityRange range, std::optional<AgentId> role_snapshot,
                         EntryType entry_type);

    // Records the persona as a RoleSetting entry scoped to the agent. Throws InvalidEntry on a
    // duplicate agent id and ValidationError on an invalid persona.
    std::uint64_t register_agent(const Persona& persona);

    std::vector<ContextEntry> visible_for(const AgentId& agent, const GroupKeys& groups,
                                          std::uint64_t upto_ts) const;
    // Convenience form: group memberships resolved from the groups seen so far, no time bound.
    std::vector<ContextEntry> visible_for(const AgentId& agent) const;

    Persona role_of(const AgentId& agent) const;
    bool is_registered(const AgentId& agent) const;
    std::vector<AgentId> agents() const;  // registration order
    GroupKeys groups_of(const AgentId& agent) const;

    std::uint64_t append_memory(const MemoryRecord& record);
    std::vector<MemoryRecord> memory_of(const AgentId& agent) const;

    void close();
    bool closed() const;
    std::uint64_t now() const;
    std::size_t size() const;
    std::vector<ContextEntry> entries() const;

    /// Session log: one JSON object per line with fields pk, ctx, range, role, type, ts.
    std::string to_log() const;
    void save_log(const std::filesystem::path& path) const;
    static void load_log(std::string_view text, ContextStore& into);
    static void load_log_file(const std::filesystem::path& path, ContextStore& into);

private:
    void insert_locked(ContextEntry entry);

    mutable std::shared_mutex mutex_;
    std::vector<ContextEntry> entries_;
    std::map<AgentId, Persona> roles_;
    std::vector<AgentId> order_;
    std::map<std::string, std::set<AgentId>> groups_;
    std::uint64_t next_pk_ = 1;
    std::uint64_t clock_ = 0;
    bool closed_ = false;
};

std::string encode_entry(const ContextEntry& entry);
ContextEntry decode_entry(std::string_view line);

std::string memory_text(const MemoryRecord& record);
std::optional<MemoryRecord> parse_memory_text(const AgentId& owner, std::string_view text);

}  // namespace mindroom

namespace mindroom {

// Dialogue and Action entries as prompt lines, oldest first; "(nothing yet)" when there are none.
std::string render_dialogue(const std::vector<ContextEntry>& entries);

}  // namespace mindroom
