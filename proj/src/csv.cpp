#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gridcast/data.hpp"
#include "gridcast/error.hpp"

namespace gridcast::data {

namespace {

bool parse_int(std::string_view text, int &out) {
	if (text.empty()) {
		return false;
	}
	const auto *end = text.data() + text.size();
	auto [ptr, ec] = std::from_chars(text.data(), end, out);
	return ec == std::errc() && ptr == end;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
	throw std::invalid_argument("unparseable timestamp '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
		s.remove_prefix(1);
	}
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
		s.remove_suffix(1);
	}
	return s;
}

std::optional<double> parse_cell(std::string_view cell) {
	cell = trim(cell);
	if (cell.empty()) {
		return std::nullopt;
	}
	if (cell.front() == '+') {
		cell.remove_prefix(1);
	}
	double value = 0.0;
	const auto *end = cell.data() + cell.size();
	auto [ptr, ec] = std::from_chars(cell.data(), end, value);
	if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
		return std::nullopt;
	}
	return value;
}

std::string lower(std::string_view s) {
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
	return out;
}

std::string format_double(double v) {
	char buf[32];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, ptr);
}

} // namespace

TimePoint parse_timestamp(std::string_view text) {
	using namespace std::chrono;
	const std::string_view original = text;
	text = trim(text);

	// Date: YYYY-MM-DD
	if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
		bad_timestamp(original);
	}
	int y = 0, mo = 0, d = 0;
	if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d)) {
		bad_timestamp(original);
	}
	const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
	if (!ymd.ok()) {
		bad_timestamp(original);
	}
	text.remove_prefix(10);

	int hh = 0, mm = 0, ss = 0;
	if (!text.empty() && (text[0] == ' ' || text[0] == 'T')) {
		text.remove_prefix(1);
		if (text.size() < 5 || text[2] != ':' || !parse_int(text.substr(0, 2), hh) || !parse_int(text.substr(3, 2), mm)) {
			bad_timestamp(original);
		}
		text.remove_prefix(5);
		if (!text.empty() && text[0] == ':') {
			if (text.size() < 3 || !parse_int(text.substr(1, 2), ss)) {
				bad_timestamp(original);
			}
			text.remove_prefix(3);
			// Fractional seconds are accepted and truncated.
			if (!text.empty() && text[0] == '.') {
				text.remove_prefix(1);
				while (!text.empty() && std::isdigit(static_cast<unsigned char>(text[0]))) {
					text.remove_prefix(1);
				}
			}
		}
	}
	if (hh > 23 || mm > 59 || ss > 60) {
		bad_timestamp(original);
	}

	int offset_minutes = 0;
	if (!text.empty()) {
		if (text == "Z" || text == "z") {
			text.remove_prefix(1);
		} else if (text[0] == '+' || text[0] == '-') {
			const int sign = text[0] == '-' ? -1 : 1;
			text.remove_prefix(1);
			int oh = 0, om = 0;
			if (text.size() == 5 && text[2] == ':' && parse_int(text.substr(0, 2), oh) && parse_int(text.substr(3, 2), om)) {
				text.remove_prefix(5);
			} else if (text.size() == 4 && parse_int(text.substr(0, 2), oh) && parse_int(text.substr(2, 2), om)) {
				text.remove_prefix(4);
			} else if (text.size() == 2 && parse_int(text, oh)) {
				text.remove_prefix(2);
			} else {
				bad_timestamp(original);
			}
			offset_minutes = sign * (oh * 60 + om);
		}
	}
	if (!text.empty()) {
		bad_timestamp(original);
	}

	const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
	return time_point_cast<seconds>(local - minutes{offset_minutes});
}

std::string format_timestamp(TimePoint t) {
	using namespace std::chrono;
	const auto day_point = floor<days>(t);
	const year_month_day ymd{day_point};
	const hh_mm_ss<seconds> hms{t - day_point};
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
	              static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
	              static_cast<long>(hms.seconds().count()));
	return buf;
}

std::vector<std::vector<std::string>> parse_csv(std::istream &in) {
	std::vector<std::vector<std::string>> rows;
	std::vector<std::string> row;
	std::string field;
	bool in_quotes = false;
	bool field_started = false;
	bool row_has_content = false;

	auto end_field = [&] {
		row.push_back(std::move(field));
		field.clear();
		field_started = false;
	};
	auto end_row = [&] {
		if (row_has_content || !row.empty() || field_started) {
			end_field();
			rows.push_back(std::move(row));
		}
		row.clear();
		row_has_content = false;
	};

	char c = 0;
	while (in.get(c)) {
		if (in_quotes) {
			if (c == '"') {
				if (in.peek() == '"') {
					in.get(c);
					field.push_back('"');
				} else {
					in_quotes = false;
				}
			} else {
				field.push_back(c);
			}
			continue;
		}
		switch (c) {
		case '"':
			in_quotes = true;
			field_started = true;
			row_has_content = true;
			break;
		case ',':
			end_field();
			row_has_content = true;
			break;
		case '\r':
			if (in.peek() == '\n') {
				in.get(c);
			}
			end_row();
			break;
		case '\n':
			end_row();
			break;
		default:
			field.push_back(c);
			field_started = true;
			row_has_content = true;
		}
	}
	if (in_quotes) {
		throw IoError("csv: unterminated quoted field");
	}
	end_row();
	return rows;
}

std::string quote_csv_field(std::string_view field) {
	if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
		return std::string(field);
	}
	std::string out = "\"";
	for (char c : field) {
		if (c == '"') {
			out += "\"\"";
		} else {
			out.push_back(c);
		}
	}
	out.push_back('"');
	return out;
}

TimeSeriesTable load_csv(const std::filesystem::path &path, std::span<const std::string> column_names) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw IoError("cannot open '" + path.string() + "'");
	}
	auto rows = parse_csv(in);
	if (rows.empty()) {
		throw IoError("'" + path.string() + "' has no header row");
	}
	const auto &header = rows.front();

	std::size_t time_col = 0;
	for (std::size_t i = 0; i < header.size(); ++i) {
		const auto name = lower(trim(header[i]));
		if (name == "time" || name == "timestamp" || name == "datetime" || name == "date") {
			time_col = i;
			break;
		}
	}

	std::vector<std::size_t> selected;
	TimeSeriesTable table;
	if (column_names.empty()) {
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (i != time_col) {
				selected.push_back(i);
				table.names.emplace_back(trim(header[i]));
			}
		}
	} else {
		for (const auto &wanted : column_names) {
			auto it = std::find_if(header.begin(), header.end(),
			                       [&](const std::string &h) { return trim(h) == trim(wanted); });
			if (it == header.end()) {
				throw IoError("'" + path.string() + "' has no column '" + wanted + "'");
			}
			selected.push_back(static_cast<std::size_t>(it - header.begin()));
			table.names.push_back(wanted);
		}
	}
	if (rows.size() < 2) {
		throw IoError("'" + path.string() + "' has no data rows");
	}

	table.columns.assign(selected.size(), {});
	for (auto &col : table.columns) {
		col.reserve(rows.size() - 1);
	}
	table.timestamps.reserve(rows.size() - 1);
	for (std::size_t r = 1; r < rows.size(); ++r) {
		const auto &row = rows[r];
		if (row.size() == 1 && trim(row[0]).empty()) {
			continue; // blank line
		}
		if (time_col >= row.size()) {
			throw IoError("'" + path.string() + "' row " + std::to_string(r + 1) + " has no timestamp");
		}
		TimePoint t;
		try {
			t = parse_timestamp(row[time_col]);
		} catch (const std::invalid_argument &e) {
			throw IoError("'" + path.string() + "' row " + std::to_string(r + 1) + ": " + e.what());
		}
		if (!table.timestamps.empty() && t <= table.timestamps.back()) {
			throw IoError("'" + path.string() + "' row " + std::to_string(r + 1) + ": timestamp " +
			              format_timestamp(t) + (t == table.timestamps.back() ? " duplicates" : " precedes") +
			              " the previous row");
		}
		table.timestamps.push_back(t);
		for (std::size_t k = 0; k < selected.size(); ++k) {
			const std::size_t c = selected[k];
			table.columns[k].push_back(c < row.size() ? parse_cell(row[c]) : std::nullopt);
		}
	}
	if (table.timestamps.empty()) {
		throw IoError("'" + path.string() + "' has no data rows");
	}
	return table;
}

void write_csv(const TimeSeriesTable &table, std::ostream &out) {
	out << "time";
	for (const auto &name : table.names) {
		out << ',' << quote_csv_field(name);
	}
	out << '\n';
	for (std::size_t r = 0; r < table.rows(); ++r) {
		out << format_timestamp(table.timestamps[r]);
		for (const auto &col : table.columns) {
			out << ',';
			if (col[r]) {
				out << format_double(*col[r]);
			}
		}
		out << '\n';
	}
}

} // namespace gridcast::data
