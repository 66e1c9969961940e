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

#include "mindroom/context_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mindroom/errors.hpp"

namespace mindroom {

std::string_view to_string(EntryType type) {
    switch (type) {
        case EntryType::Dialogue: return "Dialogue";
        case EntryType::Memory: return "Memory";
        case EntryType::Inference: return "Inference";
        case EntryType::RoleSetting: return "RoleSetting";
        case EntryType::Action: return "Action";
    }
    return "Dialogue";
}

std::optional<EntryType> parse_entry_type(std::string_view text) {
    for (auto t : {EntryType::Dialogue, EntryType::Memory, EntryType::Inference, EntryType::RoleSetting,
                   EntryType::Action}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

bool visible_to(const ContextEntry& entry, const AgentId& agent, const GroupKeys& groups) {
    return std::visit(
        [&](const auto& scope) -> bool {
            using T = std::decay_t<decltype(scope)>;
            if constexpr (std::is_same_v<T, ClassroomScope>) {
                return true;
            } else if constexpr (std::is_same_v<T, AgentScope>) {
                return scope.agent == agent;
            } else {
                return groups.contains(scope.key) && scope.members.contains(agent);
            }
        },
        entry.range);
}

std::uint64_t ContextStore::append(std::string ctx, VisibilityRange range, std::optional<AgentId> role_snapshot,
                                   EntryType entry_type) {
    if (entry_type == EntryType::RoleSetting && !role_snapshot) {
        throw InvalidEntry("RoleSetting entry requires a role snapshot");
    }
    if (const auto* group = std::get_if<GroupScope>(&range); group && group->members.empty()) {
        throw InvalidEntry("group range '" + group->key + "' has no members");
    }
    std::unique_lock lock(mutex_);
    if (closed_) throw StoreClosed();
    ContextEntry entry;
    entry.pk = next_pk_;
    entry.ctx = std::move(ctx);
    entry.range = std::move(range);
    entry.role_snapshot = std::move(role_snapshot);
    entry.entry_type = entry_type;
    entry.timestamp = clock_ + 1;
    insert_locked(entry);
    return entry.pk;
}

void ContextStore::insert_locked(ContextEntry entry) {
    if (const auto* group = std::get_if<GroupScope>(&entry.range)) {
        groups_[group->key].insert(group->members.begin(), group->members.end());
    }
    next_pk_ = std::max(next_pk_, entry.pk + 1);
    clock_ = std::max(clock_, entry.timestamp);
    entries_.push_back(std::move(entry));
}

std::uint64_t ContextStore::register_agent(const Persona& persona) {
    persona.validate();
    {
        std::shared_lock lock(mutex_);
        if (roles_.contains(persona.agent_id)) throw InvalidEntry("agent already registered: " + persona.agent_id);
    }
    const auto pk = append(nlohmann::json(persona).dump(), agent_scope(persona.agent_id), persona.agent_id,
                           EntryType::RoleSetting);
    std::unique_lock lock(mutex_);
    roles_.emplace(persona.agent_id, persona);
    order_.push_back(persona.agent_id);
    return pk;
}

std::vector<ContextEntry> ContextStore::visible_for(const AgentId& agent, const GroupKeys& groups,
                                                    std::uint64_t upto_ts) const {
    std::shared_lock lock(mutex_);
    if (!roles_.contains(agent)) throw UnknownAgent(agent);
    std::vector<ContextEntry> out;
    // Entries are appended in (timestamp, pk) order, so a forward scan is already sorted.
    for (const auto& e : entries_) {
        if (e.timestamp > upto_ts) break;
        if (visible_to(e, agent, groups)) out.push_back(e);
    }
    return out;
}

std::vector<ContextEntry> ContextStore::visible_for(const AgentId& agent) const {
    return visible_for(agent, groups_of(agent), now());
}

Persona ContextStore::role_of(const AgentId& agent) const {
    std::shared_lock lock(mutex_);
    auto it = roles_.find(agent);
    if (it == roles_.end()) throw UnknownAgent(agent);
    return it->second;
}

bool ContextStore::is_registered(const AgentId& agent) const {
    std::shared_lock lock(mutex_);
    return roles_.contains(agent);
}

std::vector<AgentId> ContextStore::agents() const {
    std::shared_lock lock(mutex_);
    return order_;
}

GroupKeys ContextStore::groups_of(const AgentId& agent) const {
    std::shared_lock lock(mutex_);
    GroupKeys keys;
    for (const auto& [key, members] : groups_) {
        if (members.contains(agent)) keys.insert(key);
    }
    return keys;
}

std::uint64_t ContextStore::append_memory(const MemoryRecord& record) {
    if (record.turn < 1) throw InvalidEntry("memory record turn must be >= 1");
    if (!is_registered(record.owner)) throw UnknownAgent(record.owner);
    return append(memory_text(record), agent_scope(record.owner), std::nullopt, EntryType::Memory);
}

std::vector<MemoryRecord> ContextStore::memory_of(const AgentId& agent) const {
    std::vector<MemoryRecord> out;
    for (const auto& e : visible_for(agent, {}, now())) {
        if (e.entry_type != EntryType::Memory) continue;
        if (const auto* scope = std::get_if<AgentScope>(&e.range); !scope || scope->agent != agent) continue;
        if (auto rec = parse_memory_text(agent, e.ctx)) out.push_back(std::move(*rec));
    }
    return out;
}

void ContextStore::close() {
    std::unique_lock lock(mutex_);
    closed_ = true;
}

bool ContextStore::closed() const {
    std::shared_lock lock(mutex_);
    return closed_;
}

std::uint64_t ContextStore::now() const {
    std::shared_lock lock(mutex_);
    return clock_;
}

std::size_t ContextStore::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<ContextEntry> ContextStore::entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

std::string encode_entry(const ContextEntry& entry) {
    nlohmann::ordered_json range = std::visit(
        [](const auto& scope) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(scope)>;
            if constexpr (std::is_same_v<T, ClassroomScope>) {
                return {{"scope", "classroom"}};
            } else if constexpr (std::is_same_v<T, AgentScope>) {
                return {{"scope", "agent"}, {"agent", scope.agent}};
            } else {
                return {{"scope", "group"}, {"group", scope.key}, {"members", scope.members}};
            }
        },
        entry.range);
    nlohmann::ordered_json j;
    j["pk"] = entry.pk;
    j["ctx"] = entry.ctx;
    j["range"] = std::move(range);
    j["role"] = entry.role_snapshot ? nlohmann::ordered_json(*entry.role_snapshot) : nlohmann::ordered_json(nullptr);
    j["type"] = std::string(to_string(entry.entry_type));
    j["ts"] = entry.timestamp;
    return j.dump();
}

ContextEntry decode_entry(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        ContextEntry e;
        e.pk = j.at("pk").get<std::uint64_t>();
        e.ctx = j.at("ctx").get<std::string>();
        const auto& r = j.at("range");
        const auto scope = r.at("scope").get<std::string>();
        if (scope == "classroom") {
            e.range = ClassroomScope{};
        } else if (scope == "agent") {
            e.range = AgentScope{r.at("agent").get<std::string>()};
        } else if (scope == "group") {
            e.range = GroupScope{r.at("group").get<std::string>(), r.at("members").get<std::set<AgentId>>()};
        } else {
            throw InvalidEntry("unknown range scope '" + scope + "'");
        }
        if (const auto& role = j.at("role"); !role.is_null()) e.role_snapshot = role.get<std::string>();
        const auto type_text = j.at("type").get<std::string>();
        const auto type = parse_entry_type(type_text);
        if (!type) throw InvalidEntry("unknown entry type '" + type_text + "'");
        e.entry_type = *type;
        e.timestamp = j.at("ts").get<std::uint64_t>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw InvalidEntry(std::string("malformed session log line: ") + ex.what());
    }
}

std::string ContextStore::to_log() const {
    std::shared_lock lock(mutex_);
    std::string out;
    for (const auto& e : entries_) {
        out += encode_entry(e);
        out += '\n';
    }
    return out;
}

void ContextStore::save_log(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write session log " + path.string());
    out << to_log();
    if (!out) throw IoError("failed writing session log " + path.string());
}

void ContextStore::load_log(std::string_view text, ContextStore& into) {
    std::unique_lock lock(into.mutex_);
    if (!into.entries_.empty()) throw InvalidEntry("session log must be loaded into an empty store");
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        auto entry = decode_entry(line);
        if (!into.entries_.empty()) {
            const auto& last = into.entries_.back();
            if (entry.timestamp <= last.timestamp || entry.pk <= last.pk) {
                throw InvalidEntry("session log is not strictly ordered at pk " + std::to_string(entry.pk));
            }
        }
        if (entry.entry_type == EntryType::RoleSetting) {
            if (!entry.role_snapshot) throw InvalidEntry("RoleSetting entry without role in session log");
            Persona p;
            try {
                p = nlohmann::json::parse(entry.ctx).get<Persona>();
            } catch (const nlohmann::json::exception& ex) {
                throw InvalidEntry(std::string("malformed persona in session log: ") + ex.what());
            }
            if (!into.roles_.contains(p.agent_id)) into.order_.push_back(p.agent_id);
            into.roles_[p.agent_id] = std::move(p);
        }
        into.insert_locked(std::move(entry));
    }
}

void ContextStore::load_log_file(const std::filesystem::path& path, ContextStore& into) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open session log " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    load_log(buf.str(), into);
}

std::string memory_text(const MemoryRecord& record) {
    return "[turn " + std::to_string(record.turn) + "] " + record.summary;
}

std::optional<MemoryRecord> parse_memory_text(const AgentId& owner, std::string_view text) {
    constexpr std::string_view prefix = "[turn ";
    if (!text.starts_with(prefix)) return std::nullopt;
    text.remove_prefix(prefix.size());
    int turn = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), turn);
    if (ec != std::errc{} || ptr == text.data() + text.size() || *ptr != ']') return std::nullopt;
    std::string_view rest(ptr + 1, text.data() + text.size() - (ptr + 1));
    if (rest.starts_with(' ')) rest.remove_prefix(1);
    return MemoryRecord{owner, std::string(rest), turn};
}

}  // namespace mindroom

namespace mindroom {

std::string render_dialogue(const std::vector<ContextEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        if (e.entry_type != EntryType::Dialogue && e.entry_type != EntryType::Action) continue;
        if (!out.empty()) out += '\n';
        out += e.entry_type == EntryType::Action ? "* " : "- ";
        out += e.ctx;
    }
    return out.empty() ? "(nothing yet)" : out;
}

}  // namespace mindroom
