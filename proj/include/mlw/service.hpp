#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include "httplib.h"

#include "mlw/proof_mode.hpp"

namespace mlw {

// A reply as the HTTP layer will send it.
struct Reply {
  int status = 200;
  json body;
  std::string content_type = "application/json";
  std::string raw;  // sent verbatim when nonempty
};

inline json error_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"number", static_cast<int>(code)}, {"message", message}}}};
}

// In-memory proof sessions behind a JSON API. Every handler is a direct call
// into proof mode; the HTTP binding only routes.
class ProofService {
 public:
  explicit ProofService(TheoryLibrary lib = TheoryLibrary(), std::optional<std::filesystem::path> snapshot_dir = {})
      : lib_(std::move(lib)), snapshot_dir_(std::move(snapshot_dir)) {
    if (snapshot_dir_) restore();
  }

  Reply create(const json& req) {
    return guard([&]() -> Reply {
      std::string theory = req.value("theory", std::string("DEF"));
      if (!req.contains("goal") || !req["goal"].is_string()) {
        return {400, error_json(ErrorCode::Schema, "request needs a string field 'goal'")};
      }
      std::string goal = req["goal"];
      auto entry = open(theory, goal);
      std::string id = new_id();
      {
        std::unique_lock lock(mu_);
        sessions_.emplace(id, entry);
      }
      snapshot(id, *entry);
      return {201, {{"id", id}, {"state", entry->session.state_json()}}};
    });
  }

  Reply tactic(const std::string& id, const json& req) {
    if (!req.contains("tactic") || !req["tactic"].is_string()) {
      return {400, error_json(ErrorCode::Schema, "request needs a string field 'tactic'")};
    }
    return mutate(id, [&](Entry& e) -> Reply {
      e.session.apply(req["tactic"].get<std::string>());
      return {200, {{"id", id}, {"state", e.session.state_json()}}};
    });
  }

  Reply undo(const std::string& id) {
    return mutate(id, [&](Entry& e) -> Reply {
      if (!e.session.undo()) return {422, error_json(ErrorCode::NoOccurrence, "nothing to undo")};
      return {200, {{"id", id}, {"state", e.session.state_json()}}};
    });
  }

  Reply state(const std::string& id) {
    return read(id, [&](Entry& e) -> Reply { return {200, {{"id", id}, {"state", e.session.state_json()}}}; });
  }

  // The checked proof object, as `.mlproof` bytes.
  Reply proof(const std::string& id) {
    return read(id, [&](Entry& e) -> Reply {
      Theorem t = e.session.qed();
      Reply r;
      r.raw = export_proof(t);
      return r;
    });
  }

  Reply remove(const std::string& id) {
    std::unique_lock lock(mu_);
    if (!sessions_.erase(id)) return {404, error_json(ErrorCode::UnresolvedName, "unknown session '" + id + "'")};
    if (snapshot_dir_) std::filesystem::remove(*snapshot_dir_ / (id + ".json"));
    return {200, {{"id", id}, {"deleted", true}}};
  }

  Reply theories() {
    return guard([&]() -> Reply {
      json list = json::array();
      for (const auto& name : lib_.list()) {
        json t = {{"name", name}};
        try {
          TheoryPtr th = lib_.load(name);
          t["imports"] = th->imports;
          t["symbols"] = th->own_symbols;
          t["notations"] = th->own_notations;
          json axioms = json::array();
          for (const auto& [n, p] : th->axioms.axioms()) {
            axioms.push_back({{"name", n}, {"pattern", print_pattern(p, true, true)}});
          }
          t["axioms"] = axioms;
        } catch (const Error& e) {
          t["error"] = error_json(e.code(), e.what())["error"];
        }
        list.push_back(std::move(t));
      }
      return {200, {{"theories", list}}};
    });
  }

  std::size_t session_count() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
  }

  // Routes the API onto `server`.
  void attach(httplib::Server& server) {
    auto send = [](httplib::Response& res, const Reply& r) {
      res.status = r.status;
      if (!r.raw.empty()) {
        res.set_content(r.raw, r.content_type);
      } else {
        res.set_content(r.body.dump(2) + "\n", r.content_type);
      }
    };
    auto body = [](const httplib::Request& req, httplib::Response& res, json& out) {
      if (req.body.empty()) {
        out = json::object();
        return true;
      }
      try {
        out = json::parse(req.body);
        return true;
      } catch (const json::parse_error& e) {
        res.status = 400;
        res.set_content(error_json(ErrorCode::Schema, std::string("invalid JSON: ") + e.what()).dump(2) + "\n",
                        "application/json");
        return false;
      }
    };
    server.Post("/sessions", [=, this](const httplib::Request& req, httplib::Response& res) {
      json j;
      if (body(req, res, j)) send(res, create(j));
    });
    server.Post(R"(/sessions/([^/]+)/tactic)", [=, this](const httplib::Request& req, httplib::Response& res) {
      json j;
      if (body(req, res, j)) send(res, tactic(req.matches[1], j));
    });
    server.Post(R"(/sessions/([^/]+)/undo)", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, undo(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/state)", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, state(req.matches[1]));
    });
    server.Get(R"(/sessions/([^/]+)/proof)", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, proof(req.matches[1]));
    });
    server.Delete(R"(/sessions/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, remove(req.matches[1]));
    });
    server.Get("/theories", [=, this](const httplib::Request&, httplib::Response& res) { send(res, theories()); });
  }

 private:
  struct Entry {
    Entry(TheoryPtr th, Pattern goal, std::string theory_name, std::string goal_text)
        : session(std::move(th), std::move(goal)), theory(std::move(theory_name)), goal(std::move(goal_text)) {}
    Session session;
    std::string theory;
    std::string goal;
    std::mutex busy;  // held for the duration of one request
  };
  using EntryPtr = std::shared_ptr<Entry>;

  TheoryLibrary lib_;
  std::optional<std::filesystem::path> snapshot_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, EntryPtr> sessions_;
  std::mt19937_64 rng_{std::random_device{}()};
  std::mutex rng_mu_;

  EntryPtr open(const std::string& theory, const std::string& goal) {
    TheoryPtr th = theory == "empty" ? empty_theory() : lib_.load(theory);
    return std::make_shared<Entry>(th, th->parse(goal), theory, goal);
  }

  std::string new_id() {
    std::lock_guard<std::mutex> lock(rng_mu_);
    for (;;) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
      std::shared_lock l(mu_);
      if (!sessions_.count(buf)) return buf;
    }
  }

  EntryPtr find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  template <class F>
  static Reply guard(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      int status = e.code() == ErrorCode::Internal ? 500 : 422;
      return {status, error_json(e.code(), e.what())};
    } catch (const std::exception& e) {
      return {500, error_json(ErrorCode::Internal, e.what())};
    }
  }

  // Runs f with exclusive use of the session; a concurrent request gets 409.
  template <class F>
  Reply with_session(const std::string& id, F&& f) {
    EntryPtr e = find(id);
    if (!e) return {404, error_json(ErrorCode::UnresolvedName, "unknown session '" + id + "'")};
    std::unique_lock<std::mutex> lock(e->busy, std::try_to_lock);
    if (!lock.owns_lock()) {
      return {409, error_json(ErrorCode::PreconditionFailed, "session '" + id + "' is busy with another request")};
    }
    return guard([&] { return f(*e); });
  }

  template <class F>
  Reply read(const std::string& id, F&& f) {
    return with_session(id, std::forward<F>(f));
  }

  template <class F>
  Reply mutate(const std::string& id, F&& f) {
    return with_session(id, [&](Entry& e) {
      Reply r = f(e);
      if (r.status < 300) snapshot(id, e);
      return r;
    });
  }

  // Sessions are saved as theory + goal + script and restored by replay.
  void snapshot(const std::string& id, Entry& e) const {
    if (!snapshot_dir_) return;
    std::filesystem::create_directories(*snapshot_dir_);
    json j = {{"theory", e.theory}, {"goal", e.goal}, {"script", e.session.script()}};
    auto tmp = *snapshot_dir_ / (id + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, *snapshot_dir_ / (id + ".json"));
  }

  void restore() {
    if (!std::filesystem::is_directory(*snapshot_dir_)) return;
    for (const auto& f : std::filesystem::directory_iterator(*snapshot_dir_)) {
      if (f.path().extension() != ".json") continue;
      try {
        json j = json::parse(read_file(f.path()));
        auto e = open(j.at("theory").get<std::string>(), j.at("goal").get<std::string>());
        for (const auto& t : j.at("script")) e->session.apply(t.get<std::string>());
        sessions_.emplace(f.path().stem().string(), e);
      } catch (const std::exception&) {
        // A snapshot that no longer replays is skipped, not fatal.
      }
    }
  }
};

}  // namespace mlw
