#include <sqlite3.h>

#include <charconv>
#include <chrono>

#include "surveybot/flow/session_json.hpp"
#include "surveybot/persistence/csv.hpp"
#include "surveybot/persistence/storage.hpp"

namespace surveybot::persistence {

namespace {

constexpr const char* kCompetencyColumn = "DopKomp_odp_num_1";

std::string column_type(const std::string& name) {
    if (name == "Id") return "INTEGER PRIMARY KEY AUTOINCREMENT";
    if (name == "Fb_Id") return "TEXT NOT NULL";
    if (name == "Timezone" || (name.starts_with("TIPIPL_") && !name.starts_with("TIPIPL_odp_"))) return "REAL";
    if (name.starts_with("TIPIPL_odp_") || name.starts_with("Inter_odp_") || name == "Age" || name == "It_skils" ||
        name == "Immigrant")
        return "INTEGER";
    return "TEXT";
}

/// Export columns that live in the records table, with their position in the export row.
std::vector<std::pair<std::string, std::size_t>> table_columns() {
    std::vector<std::pair<std::string, std::size_t>> out;
    const auto& all = export_columns();
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i] != kCompetencyColumn) out.emplace_back(all[i], i);
    return out;
}

std::optional<std::string> blank_to_null(std::optional<std::string> s) {
    if (s && s->empty()) return std::nullopt;
    return s;
}

}  // namespace

Clock system_clock() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

std::string Storage::export_csv(const RecordFilter& filter) { return records_to_csv(list(filter)); }

struct SqliteStorage::Db {
    sqlite3* handle = nullptr;

    void exec(const std::string& sql) const {
        char* err = nullptr;
        if (sqlite3_exec(handle, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            throw StorageError(StorageErrorCode::storage, msg + " in: " + sql);
        }
    }
};

namespace {

class Statement {
public:
    Statement(sqlite3* db, const std::string& sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK)
            throw StorageError(StorageErrorCode::storage, std::string(sqlite3_errmsg(db)) + " in: " + sql);
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    void bind(int i, const std::optional<std::string>& v) {
        int rc = v ? sqlite3_bind_text(stmt_, i, v->data(), static_cast<int>(v->size()), SQLITE_TRANSIENT)
                   : sqlite3_bind_null(stmt_, i);
        check(rc);
    }
    void bind(int i, std::int64_t v) { check(sqlite3_bind_int64(stmt_, i, v)); }

    /// True while rows are available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StorageError(StorageErrorCode::storage, sqlite3_errmsg(db_));
    }

    std::optional<std::string> text(int col) const {
        if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)));
    }
    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

private:
    void check(int rc) const {
        if (rc != SQLITE_OK) throw StorageError(StorageErrorCode::storage, sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

std::string select_list() {
    std::string cols;
    for (const auto& [name, pos] : table_columns()) {
        if (!cols.empty()) cols += ", ";
        cols += '"' + name + '"';
    }
    return cols + ", finalized";
}

}  // namespace

SqliteStorage::SqliteStorage(const std::string& path, Clock clock) : db_(std::make_unique<Db>()), clock_(std::move(clock)) {
    if (sqlite3_open_v2(path.c_str(), &db_->handle, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
        std::string msg = db_->handle ? sqlite3_errmsg(db_->handle) : "out of memory";
        sqlite3_close(db_->handle);
        throw StorageError(StorageErrorCode::storage, "cannot open " + path + ": " + msg);
    }
    sqlite3_busy_timeout(db_->handle, 5000);
    db_->exec("PRAGMA foreign_keys = ON");
    if (path != ":memory:") db_->exec("PRAGMA journal_mode = WAL");

    std::string ddl = "CREATE TABLE IF NOT EXISTS records (";
    for (const auto& [name, pos] : table_columns()) ddl += '"' + name + "\" " + column_type(name) + ", ";
    ddl += "finalized INTEGER NOT NULL DEFAULT 0)";
    db_->exec(ddl);
    db_->exec("CREATE INDEX IF NOT EXISTS records_fb_id ON records (Fb_Id)");
    db_->exec(
        "CREATE TABLE IF NOT EXISTS competency_answers ("
        "record_id INTEGER NOT NULL REFERENCES records (Id), item INTEGER NOT NULL, value INTEGER NOT NULL, "
        "PRIMARY KEY (record_id, item))");
    db_->exec(
        "CREATE TABLE IF NOT EXISTS sessions ("
        "session_id TEXT PRIMARY KEY, record_id INTEGER REFERENCES records (Id), state TEXT NOT NULL)");
}

SqliteStorage::~SqliteStorage() { sqlite3_close(db_->handle); }

void SqliteStorage::run_atomically(const std::function<void()>& body) {
    std::lock_guard lock(mutex_);
    db_->exec("SAVEPOINT op");
    try {
        body();
    } catch (...) {
        try {
            db_->exec("ROLLBACK TO op");
            db_->exec("RELEASE op");
        } catch (...) {
        }
        throw;
    }
    db_->exec("RELEASE op");
}

std::optional<SessionRecord> SqliteStorage::get(std::int64_t record_id) {
    auto rows = select(record_id, RecordFilter{});
    if (rows.empty()) return std::nullopt;
    return std::move(rows.front());
}

std::vector<SessionRecord> SqliteStorage::list(const RecordFilter& filter) { return select(std::nullopt, filter); }

std::vector<SessionRecord> SqliteStorage::select(std::optional<std::int64_t> id, const RecordFilter& filter) {
    std::lock_guard lock(mutex_);
    std::string sql = "SELECT " + select_list() + " FROM records WHERE 1 = 1";
    if (id) sql += " AND Id = ?";
    if (filter.finalized_only) sql += " AND finalized = 1";
    if (filter.language) sql += " AND Jezyk = ?";
    sql += " ORDER BY Id";
    Statement st(db_->handle, sql);
    int n = 1;
    if (id) st.bind(n++, *id);
    if (filter.language) st.bind(n, std::optional<std::string>(std::string(to_string(*filter.language))));

    const auto columns = table_columns();
    std::vector<SessionRecord> out;
    while (st.step()) {
        CsvRow cells(export_columns().size());
        for (std::size_t i = 0; i < columns.size(); ++i) cells[columns[i].second] = st.text(static_cast<int>(i));
        SessionRecord r = from_row(cells);
        r.finalized = st.integer(static_cast<int>(columns.size())) != 0;
        out.push_back(std::move(r));
    }

    std::string comp_sql = "SELECT record_id, item, value FROM competency_answers";
    if (id) comp_sql += " WHERE record_id = ?";
    Statement comp(db_->handle, comp_sql + " ORDER BY record_id, item");
    if (id) comp.bind(1, *id);
    std::size_t k = 0;
    while (comp.step()) {
        const std::int64_t id = comp.integer(0);
        while (k < out.size() && out[k].id < id) ++k;
        if (k == out.size()) break;
        if (out[k].id != id) continue;
        const auto item = comp.integer(1);
        if (item >= 0 && item < static_cast<std::int64_t>(scoring::kCompetencyItems))
            out[k].competency[static_cast<std::size_t>(item)] = static_cast<int>(comp.integer(2));
    }
    return out;
}

std::optional<SessionRecord> SqliteStorage::find_latest(const std::string& fb_id) {
    std::lock_guard lock(mutex_);
    Statement st(db_->handle, "SELECT MAX(Id) FROM records WHERE Fb_Id = ?");
    st.bind(1, std::optional<std::string>(fb_id));
    if (!st.step() || !st.text(0)) return std::nullopt;
    return get(st.integer(0));
}

SessionRecord SqliteStorage::create_record(const std::string& fb_id, const ProfileAttributes& attributes) {
    if (fb_id.empty()) throw StorageError(StorageErrorCode::storage, "fb_id must not be empty");
    std::int64_t id = 0;
    run_atomically([&] {
        Statement dup(db_->handle, "SELECT 1 FROM records WHERE Fb_Id = ? AND finalized = 0");
        dup.bind(1, std::optional<std::string>(fb_id));
        if (dup.step())
            throw StorageError(StorageErrorCode::duplicate_active_session, "active session exists for " + fb_id);

        SessionRecord r;
        r.fb_id = fb_id;
        r.profile = attributes;
        auto& p = r.profile;
        for (auto* s : {&p.first_name, &p.last_name, &p.locale, &p.hometown, &p.birthday, &p.gender, &p.profile_pic})
            *s = blank_to_null(*s);
        r.record_created = clock_();

        Statement ins(db_->handle, "INSERT INTO records (Fb_Id, Record_created) VALUES (?, ?)");
        ins.bind(1, std::optional<std::string>(fb_id));
        ins.bind(2, std::optional<std::string>(format_timestamp(r.record_created)));
        ins.step();
        id = sqlite3_last_insert_rowid(db_->handle);
        r.id = id;
        write(r);
    });
    return require(id);
}

SessionRecord SqliteStorage::require(std::int64_t record_id) {
    auto r = get(record_id);
    if (!r) throw StorageError(StorageErrorCode::not_found, "no record " + std::to_string(record_id));
    return *r;
}

void SqliteStorage::write(const SessionRecord& record) {
    const auto cells = to_row(record);
    const auto columns = table_columns();
    std::string sql = "UPDATE records SET ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) sql += ", ";
        sql += '"' + columns[i].first + "\" = ?";
    }
    sql += ", finalized = ? WHERE Id = ?";
    Statement st(db_->handle, sql);
    int n = 1;
    for (const auto& [name, pos] : columns) st.bind(n++, cells[pos]);
    st.bind(n++, static_cast<std::int64_t>(record.finalized ? 1 : 0));
    st.bind(n, record.id);
    st.step();

    Statement del(db_->handle, "DELETE FROM competency_answers WHERE record_id = ?");
    del.bind(1, record.id);
    del.step();
    for (std::size_t i = 0; i < record.competency.size(); ++i) {
        if (!record.competency[i]) continue;
        Statement ins(db_->handle, "INSERT INTO competency_answers (record_id, item, value) VALUES (?, ?, ?)");
        ins.bind(1, record.id);
        ins.bind(2, static_cast<std::int64_t>(i));
        ins.bind(3, static_cast<std::int64_t>(*record.competency[i]));
        ins.step();
    }
}

void SqliteStorage::update(std::int64_t record_id, const std::function<void(SessionRecord&)>& change) {
    run_atomically([&] {
        SessionRecord r = require(record_id);
        change(r);
        write(r);
    });
}

void SqliteStorage::save_answer(std::int64_t record_id, std::string_view question_id, int value) {
    update(record_id, [&](SessionRecord& r) { apply_answer(r, question_id, value); });
}

void SqliteStorage::save_scores(std::int64_t record_id, const scoring::BigFiveProfile& profile) {
    update(record_id, [&](SessionRecord& r) { apply_scores(r, profile); });
}

void SqliteStorage::set_language(std::int64_t record_id, Locale locale) {
    update(record_id, [&](SessionRecord& r) {
        if (r.language) throw StorageError(StorageErrorCode::field_already_set, "Jezyk already set");
        r.language = std::string(to_string(locale));
    });
}

void SqliteStorage::mark_finalized(std::int64_t record_id) {
    update(record_id, [](SessionRecord& r) { r.finalized = true; });
}

void SqliteStorage::save_session(const flow::Session& session) {
    const std::string state = flow::session_to_json(session).dump();
    run_atomically([&] {
        Statement st(db_->handle,
                     "INSERT INTO sessions (session_id, record_id, state) VALUES (?, ?, ?) "
                     "ON CONFLICT (session_id) DO UPDATE SET state = excluded.state");
        st.bind(1, std::optional<std::string>(session.session_id));
        std::int64_t record_id = 0;
        auto [p, ec] = std::from_chars(session.session_id.data(),
                                       session.session_id.data() + session.session_id.size(), record_id);
        if (ec == std::errc() && p == session.session_id.data() + session.session_id.size())
            st.bind(2, record_id);
        else
            st.bind(2, std::optional<std::string>());
        st.bind(3, std::optional<std::string>(state));
        st.step();
    });
}

std::optional<flow::Session> SqliteStorage::load_session(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    Statement st(db_->handle, "SELECT state FROM sessions WHERE session_id = ?");
    st.bind(1, std::optional<std::string>(session_id));
    if (!st.step()) return std::nullopt;
    try {
        return flow::session_from_json(nlohmann::json::parse(*st.text(0)));
    } catch (const std::exception& e) {
        throw StorageError(StorageErrorCode::storage, "corrupt session " + session_id + ": " + e.what());
    }
}

}  // namespace surveybot::persistence
