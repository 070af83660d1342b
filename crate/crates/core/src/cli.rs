//! Command-line front end. The `compocheck` binary is a thin wrapper around
//! [`main_with`], which takes its output streams as arguments so the whole
//! command surface can be driven from tests.
//!
//! Exit codes: `0` success, `1` rule errors or unsafe routing, `2` usage,
//! parse or integrity errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::diagnostic::{fmt_set, Code, Diagnostic, Severity};
use crate::ingest::{self, Format, LoadError};
use crate::integrity::{resolve, synthesize_deleg_associations, validate_integrity};
use crate::model::{Element, Model};
use crate::rules::{self, check_model_with, end_path, CheckOptions};
use crate::sim::{self, SimError};
use crate::types::{LinkInfo, LinkOrigin, TypeSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "compocheck", version, about = "Check and simulate hierarchical component models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Auto,
    Dsl,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Model file (`.csm` or `.csm.json`).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Rule codes to report as warnings, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub downgrade: Vec<Code>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run integrity checks and the well-formedness rules.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Show what the checker derives for one element.
    Explain {
        #[command(flatten)]
        common: Common,
        /// `Class#index`, `Class.port`, `Class.part.port`, `Class.part` or a name.
        element: String,
    },
    /// Route requests through an instance of the root class.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Root class; defaults to the model's `root` declaration.
        #[arg(long)]
        root: Option<String>,
        /// Injection `LOCATION:INTERFACE`; repeatable. Defaults to every
        /// provided port of the root with every interface it carries.
        #[arg(long = "inject", value_name = "LOC:IFACE")]
        inject: Vec<String>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, color, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

/// Resolves `COMPOCHECK_COLOR` (`auto`, `always`, `never`) against whether
/// stdout is a terminal.
pub fn color_from_env(value: Option<&str>, stdout_is_tty: bool) -> bool {
    match value.map(str::to_ascii_lowercase).as_deref() {
        Some("always") => true,
        Some("never") => false,
        _ => stdout_is_tty,
    }
}

pub fn run(cli: Cli, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ctx = Ctx { color, out, err };
    match cli.command {
        Command::Check { common } => ctx.check(&common),
        Command::Explain { common, element } => ctx.explain(&common, &element),
        Command::Simulate {
            common,
            root,
            inject,
        } => ctx.simulate(&common, root.as_deref(), &inject),
    }
}

struct Ctx<'a> {
    color: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn paint(color: bool, text: &str) -> String {
    if !color {
        return text.to_string();
    }
    text.lines()
        .map(|line| {
            let code = if line.starts_with("error[") || line.starts_with("failed") {
                "31"
            } else if line.starts_with("warning[") {
                "33"
            } else if line.starts_with("note[") {
                "36"
            } else if line.starts_with("passed") || line.starts_with("safe") {
                "32"
            } else {
                return format!("{line}\n");
            };
            format!("\x1b[{code}m{line}\x1b[0m\n")
        })
        .collect()
}

fn diag_list(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

impl Ctx<'_> {
    fn say(&mut self, text: &str) {
        let _ = self.out.write_all(paint(self.color, text).as_bytes());
    }

    fn complain(&mut self, text: &str) {
        let _ = self.err.write_all(paint(self.color, text).as_bytes());
    }

    /// Parse, integrity, synthesis. On failure the diagnostics have been
    /// printed and the exit code is returned.
    fn load(&mut self, common: &Common) -> Result<Model, i32> {
        let format = match common.format {
            InputFormat::Auto => Format::Auto,
            InputFormat::Dsl => Format::Dsl,
            InputFormat::Json => Format::Json,
        };
        let model = match ingest::load(&common.input, format) {
            Ok(m) => m,
            Err(LoadError::Parse(errors)) => {
                let text: String = errors.iter().map(|e| format!("error: {e}\n")).collect();
                self.complain(&text);
                return Err(EXIT_INPUT);
            }
            Err(e) => {
                self.complain(&format!("error: {e}\n"));
                return Err(EXIT_INPUT);
            }
        };
        let integrity = validate_integrity(&model);
        if !integrity.is_empty() {
            self.report_integrity(common, &integrity);
            return Err(EXIT_INPUT);
        }
        synthesize_deleg_associations(&model).map_err(|diags| {
            self.report_integrity(common, &diags);
            EXIT_INPUT
        })
    }

    fn report_integrity(&mut self, common: &Common, diags: &[Diagnostic]) {
        if common.output == OutputFormat::Json {
            let v = json!({"passed": false, "diagnostics": diags, "notes": [], "stats": {}});
            self.say(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
        } else {
            self.complain(&diag_list(diags));
        }
    }

    fn options(common: &Common) -> CheckOptions {
        CheckOptions {
            downgrade: common.downgrade.iter().copied().collect(),
        }
    }

    fn check(&mut self, common: &Common) -> i32 {
        let model = match self.load(common) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let report = check_model_with(&model, &Self::options(common));
        match common.output {
            OutputFormat::Json => self.say(&report.to_json()),
            OutputFormat::Text => self.say(&report.render_text()),
        }
        if report.passed {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }

    fn explain(&mut self, common: &Common, path: &str) -> i32 {
        let model = match self.load(common) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let element = match resolve(&model, path) {
            Ok(e) => e,
            Err(d) => {
                self.report_integrity(common, &[d]);
                return EXIT_INPUT;
            }
        };
        let ts = TypeSystem::new(&model);
        let (text, value) = explain_element(&ts, path, element, &Self::options(common));
        match common.output {
            OutputFormat::Json => {
                self.say(&format!("{}\n", serde_json::to_string_pretty(&value).expect("json")))
            }
            OutputFormat::Text => self.say(&text),
        }
        EXIT_OK
    }

    fn simulate(&mut self, common: &Common, root: Option<&str>, inject: &[String]) -> i32 {
        let model = match self.load(common) {
            Ok(m) => m,
            Err(code) => return code,
        };
        let Some(root) = root.map(str::to_string).or_else(|| model.root.clone()) else {
            self.complain("error: simulate needs --root or a `root` declaration in the model\n");
            return EXIT_INPUT;
        };
        let mut injections = Vec::new();
        for spec in inject {
            match spec.rsplit_once(':') {
                Some((loc, iface)) if !loc.is_empty() && !iface.is_empty() => {
                    injections.push((loc.to_string(), iface.to_string()))
                }
                _ => {
                    self.complain(&format!(
                        "error: invalid injection `{spec}`, expected LOCATION:INTERFACE\n"
                    ));
                    return EXIT_INPUT;
                }
            }
        }
        let report = check_model_with(&model, &Self::options(common));
        let rule_errors: Vec<Diagnostic> = report
            .diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .cloned()
            .collect();
        if !rule_errors.is_empty() {
            self.complain(&format!(
                "{}rule errors present; simulating anyway\n",
                diag_list(&rule_errors)
            ));
        }
        let injections = (!inject.is_empty()).then_some(injections.as_slice());
        let (trace, safety) = match sim::simulate(&model, &root, injections) {
            Ok((_, trace, safety)) => (trace, safety),
            Err(e @ (SimError::Cycle { .. } | SimError::HopBound { .. })) => {
                self.complain(&format!("error: {e}\n"));
                return EXIT_FAILED;
            }
            Err(e) => {
                self.complain(&format!("error: {e}\n"));
                return EXIT_INPUT;
            }
        };
        match common.output {
            OutputFormat::Json => self.say(&trace.to_json_lines()),
            OutputFormat::Text => {
                let mut text = trace.render_text();
                for v in &safety.violations {
                    text.push_str(&format!(
                        "error[routing] request {} ({}): {} via {}\n",
                        v.request,
                        v.interface,
                        v.message,
                        v.path.join(" -> ")
                    ));
                }
                text.push_str(&format!(
                    "{}: {} request(s), {} violation(s)\n",
                    if safety.safe { "safe" } else { "failed" },
                    safety.requests,
                    safety.violations.len()
                ));
                self.say(&text);
            }
        }
        if safety.safe && rule_errors.is_empty() {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }
}

fn set(s: &std::collections::BTreeSet<&str>) -> Vec<String> {
    s.iter().map(|i| i.to_string()).collect()
}

fn origin_text(link: &LinkInfo<'_>) -> String {
    match (link.origin, link.start()) {
        (LinkOrigin::Undirected, _) | (_, None) => "undirected".to_string(),
        (_, Some(start)) => format!("origin {start}"),
    }
}

fn transported_text(link: &LinkInfo<'_>) -> String {
    if link.transported.computable {
        fmt_set(link.transported.interfaces.iter().copied())
    } else {
        "not computed".to_string()
    }
}

fn explain_element(
    ts: &TypeSystem<'_>,
    path: &str,
    element: Element<'_>,
    options: &CheckOptions,
) -> (String, Value) {
    let links = ts.links();
    match element {
        Element::Connector { id, .. } => {
            let Some(link) = links.iter().find(|l| l.id == id) else {
                return (
                    format!("{path}: ends do not resolve\n"),
                    json!({"element": path, "resolved": false}),
                );
            };
            let assoc = link.association.map(|a| a.name.clone());
            let mut text = format!(
                "{path}: {}, {}, transports {}\n  ends: {} -- {}\n  association: {}\n",
                link.kind,
                origin_text(link),
                transported_text(link),
                link.end1,
                link.end2,
                assoc.clone().unwrap_or_else(|| "none (default deleg_I per interface)".into())
            );
            text.push_str(&format!("  {}\n", link.kind.describe()));
            let value = json!({
                "element": path,
                "kind": link.kind.to_string(),
                "origin": link.start().map(|s| s.to_string()),
                "transported": link.transported.computable.then(|| set(&link.transported.interfaces)),
                "association": assoc,
                "end1": link.end1.to_string(),
                "end2": link.end2.to_string(),
            });
            (text, value)
        }
        Element::Port { port, .. } => {
            let closure = ts.port_interfaces(port);
            let outgoing: Vec<&LinkInfo<'_>> = links
                .iter()
                .filter(|l| l.start().is_some_and(|s| l.origin.is_from_port() && end_path(l, s) == path))
                .collect();
            let mut text = format!(
                "{path}: {} port, contract {}, carries {}\n",
                port.direction(),
                port.contract,
                fmt_set(closure.iter().copied())
            );
            let mut link_values = Vec::new();
            for l in &outgoing {
                let p = format!("{}#{}", l.owner.name, l.id.index);
                text.push_str(&format!(
                    "  {p} -> {}: {}{}\n",
                    l.far().map(|f| f.to_string()).unwrap_or_default(),
                    transported_text(l),
                    l.association.map(|a| format!(" via {}", a.name)).unwrap_or_default()
                ));
                link_values.push(json!({
                    "connector": p,
                    "transported": set(&l.transported.interfaces),
                    "association": l.association.map(|a| a.name.clone()),
                }));
            }
            let union: std::collections::BTreeSet<&str> = outgoing
                .iter()
                .flat_map(|l| l.transported.interfaces.iter().copied())
                .collect();
            let mut status = Vec::new();
            let mut rule_diags = rules::rule_pairwise_disjoint(&links);
            rule_diags.extend(rules::rule_completeness(ts, &links));
            for code in [Code::W007, Code::W008] {
                let hit = rule_diags.iter().find(|d| d.code == code && d.subject == path);
                let severity = if options.downgrade.contains(&code) { "warning" } else { "error" };
                status.push(match hit {
                    Some(d) => (code, format!("{severity}: {}", d.message)),
                    None => (code, "ok".to_string()),
                });
            }
            if outgoing.is_empty() {
                text.push_str("  no outgoing links\n");
            } else {
                let complete = union == closure;
                text.push_str(&format!(
                    "  union of links {}, {}\n",
                    fmt_set(union.iter().copied()),
                    if complete { "complete" } else { "incomplete" }
                ));
            }
            for (code, s) in &status {
                text.push_str(&format!("  {code}: {s}\n"));
            }
            let value = json!({
                "element": path,
                "direction": port.direction().to_string(),
                "contract": port.contract,
                "interfaces": set(&closure),
                "links": link_values,
                "union": set(&union),
                "complete": !outgoing.is_empty() && union == closure,
                "rules": status.iter().map(|(c, s)| (c.to_string(), Value::String(s.clone()))).collect::<serde_json::Map<_, _>>(),
            });
            (text, value)
        }
        Element::Part { part, .. } => {
            let provided = ts.class_interfaces(&part.ty);
            (
                format!(
                    "{path}: part of type {} x{}, provides {}\n",
                    part.ty,
                    part.multiplicity,
                    fmt_set(provided.iter().copied())
                ),
                json!({"element": path, "type": part.ty, "multiplicity": part.multiplicity, "interfaces": set(provided)}),
            )
        }
        Element::Class(c) => {
            let provided = ts.class_interfaces(&c.name);
            let used = ts.used_interfaces(c);
            (
                format!(
                    "{path}: {} class, provides {}, uses {}, {} part(s), {} port(s), {} connector(s)\n",
                    c.kind,
                    fmt_set(provided.iter().copied()),
                    fmt_set(used.iter().copied()),
                    c.parts.len(),
                    c.ports.len(),
                    c.connectors.len()
                ),
                json!({
                    "element": path,
                    "kind": c.kind,
                    "interfaces": set(provided),
                    "uses": set(&used),
                    "parts": c.parts.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
                    "ports": c.ports.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
                }),
            )
        }
        Element::Interface(i) => {
            let closure = ts.interface_closure(&i.name);
            let kind = if i.is_group { "interface group" } else { "interface" };
            (
                format!(
                    "{path}: {kind}, closure {}\n",
                    fmt_set(closure.iter().copied())
                ),
                json!({"element": path, "group": i.is_group, "closure": set(&closure)}),
            )
        }
        Element::Association(a) => {
            let nav = |n: bool| if n { " (navigable)" } else { "" };
            (
                format!(
                    "{path}: {}{} -- {}{}{}\n",
                    a.end1.ty,
                    nav(a.end1.navigable),
                    a.end2.ty,
                    nav(a.end2.navigable),
                    if a.synthesized { ", synthesized" } else { "" }
                ),
                json!({"element": path, "end1": a.end1, "end2": a.end2, "synthesized": a.synthesized}),
            )
        }
    }
}
