//! Reports: aligned tables for people, tab-separated records for programs.
//!
//! Machine lines are `command`, `space`, `table <title>`, `columns ...`,
//! `row ...`, `note ...` and `end`, fields separated by tabs. Every cell of the
//! table view appears in them, together with the columns marked machine-only.

use std::fmt::Write as _;

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Column {
    pub name: String,
    pub machine_only: bool,
    pub right: bool,
}

impl Table {
    pub fn new(title: impl Into<String>) -> Self {
        Table { title: title.into(), ..Default::default() }
    }

    pub fn col(mut self, name: &str) -> Self {
        self.columns.push(Column { name: name.into(), machine_only: false, right: false });
        self
    }

    /// Right-aligned column, for numbers.
    pub fn num(mut self, name: &str) -> Self {
        self.columns.push(Column { name: name.into(), machine_only: false, right: true });
        self
    }

    pub fn machine_col(mut self, name: &str) -> Self {
        self.columns.push(Column { name: name.into(), machine_only: true, right: false });
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub space: String,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str, space: &str) -> Self {
        Report { command: command.into(), space: space.into(), tables: Vec::new() }
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            self.machine()
        } else {
            self.text()
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} on {}", self.command, self.space);
        for t in &self.tables {
            let _ = writeln!(out, "\n{}", t.title);
            let shown: Vec<usize> = (0..t.columns.len()).filter(|&i| !t.columns[i].machine_only).collect();
            let width = |i: usize| {
                t.rows.iter().map(|r| r[i].chars().count()).chain([t.columns[i].name.chars().count()]).max().unwrap_or(0)
            };
            let widths: Vec<usize> = shown.iter().map(|&i| width(i)).collect();
            let line = |cells: Vec<&str>| -> String {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&shown)
                    .zip(&widths)
                    .map(|((c, &i), &w)| if t.columns[i].right { format!("{c:>w$}") } else { format!("{c:<w$}") })
                    .collect();
                format!("  {}", parts.join("  ").trim_end())
            };
            if !t.rows.is_empty() {
                let _ = writeln!(out, "{}", line(shown.iter().map(|&i| t.columns[i].name.as_str()).collect()));
                for r in &t.rows {
                    let _ = writeln!(out, "{}", line(shown.iter().map(|&i| r[i].as_str()).collect()));
                }
            }
            for n in &t.notes {
                let _ = writeln!(out, "  {n}");
            }
        }
        out
    }

    fn machine(&self) -> String {
        let clean = |s: &str| s.replace(['\t', '\n'], " ");
        let mut out = String::new();
        let _ = writeln!(out, "command\t{}", clean(&self.command));
        let _ = writeln!(out, "space\t{}", clean(&self.space));
        for t in &self.tables {
            let _ = writeln!(out, "table\t{}", clean(&t.title));
            let cols: Vec<String> = t.columns.iter().map(|c| clean(&c.name)).collect();
            let _ = writeln!(out, "columns\t{}", cols.join("\t"));
            for r in &t.rows {
                let cells: Vec<String> = r.iter().map(|c| clean(c)).collect();
                let _ = writeln!(out, "row\t{}", cells.join("\t"));
            }
            for n in &t.notes {
                let _ = writeln!(out, "note\t{}", clean(n));
            }
            out.push_str("end\n");
        }
        out
    }
}
