#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "surveybot/flow/types.hpp"
#include "surveybot/persistence/record.hpp"

namespace surveybot::persistence {

struct RecordFilter {
    bool finalized_only = false;
    std::optional<Locale> language;
};

/// Unix milliseconds.
using Clock = std::function<std::int64_t()>;

Clock system_clock();

/// Records plus the engine's session state. Every call is atomic; calls made
/// inside run_atomically() commit or roll back together.
class Storage {
public:
    virtual ~Storage() = default;

    /// Throws DUPLICATE_ACTIVE_SESSION if fb_id has an unfinalized record.
    virtual SessionRecord create_record(const std::string& fb_id, const ProfileAttributes& attributes) = 0;
    virtual void save_answer(std::int64_t record_id, std::string_view question_id, int value) = 0;
    virtual void save_scores(std::int64_t record_id, const scoring::BigFiveProfile& profile) = 0;
    virtual void set_language(std::int64_t record_id, Locale locale) = 0;
    virtual void mark_finalized(std::int64_t record_id) = 0;

    virtual std::optional<SessionRecord> get(std::int64_t record_id) = 0;
    virtual std::vector<SessionRecord> list(const RecordFilter& filter) = 0;
    /// Most recent record for the user, finalized or not.
    virtual std::optional<SessionRecord> find_latest(const std::string& fb_id) = 0;

    /// The session id is the decimal record id.
    virtual void save_session(const flow::Session& session) = 0;
    virtual std::optional<flow::Session> load_session(const std::string& session_id) = 0;

    virtual void run_atomically(const std::function<void()>& body) = 0;

    std::string export_csv(const RecordFilter& filter);
};

/// SQLite-backed store in a single file; ":memory:" for a private in-memory database.
class SqliteStorage : public Storage {
public:
    explicit SqliteStorage(const std::string& path, Clock clock = system_clock());
    ~SqliteStorage() override;
    SqliteStorage(const SqliteStorage&) = delete;
    SqliteStorage& operator=(const SqliteStorage&) = delete;

    SessionRecord create_record(const std::string& fb_id, const ProfileAttributes& attributes) override;
    void save_answer(std::int64_t record_id, std::string_view question_id, int value) override;
    void save_scores(std::int64_t record_id, const scoring::BigFiveProfile& profile) override;
    void set_language(std::int64_t record_id, Locale locale) override;
    void mark_finalized(std::int64_t record_id) override;

    std::optional<SessionRecord> get(std::int64_t record_id) override;
    std::vector<SessionRecord> list(const RecordFilter& filter) override;
    std::optional<SessionRecord> find_latest(const std::string& fb_id) override;

    void save_session(const flow::Session& session) override;
    std::optional<flow::Session> load_session(const std::string& session_id) override;

    void run_atomically(const std::function<void()>& body) override;

private:
    struct Db;

    std::vector<SessionRecord> select(std::optional<std::int64_t> id, const RecordFilter& filter);
    SessionRecord require(std::int64_t record_id);
    void write(const SessionRecord& record);
    void update(std::int64_t record_id, const std::function<void(SessionRecord&)>& change);

    std::unique_ptr<Db> db_;
    Clock clock_;
    std::recursive_mutex mutex_;
};

}  // namespace surveybot::persistence
