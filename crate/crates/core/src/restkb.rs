//! The restaurant knowledge base, embedded in the binary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::sema::{analyze, Diagnostics, LintConfig, ResolvedLibrary, SourceNames};
use crate::syntax::{parse_system_description, ParseError, StructureAst, SystemDescriptionAst};

/// Module files in import order.
pub const MODULES: [(&str, &str); 7] = [
    ("root", include_str!("../../../lib/restkb/root.alm")),
    ("motion", include_str!("../../../lib/restkb/motion.alm")),
    ("bodily_motion", include_str!("../../../lib/restkb/bodily_motion.alm")),
    ("grasping_releasing", include_str!("../../../lib/restkb/grasping_releasing.alm")),
    ("communication", include_str!("../../../lib/restkb/communication.alm")),
    ("eating", include_str!("../../../lib/restkb/eating.alm")),
    ("restaurant", include_str!("../../../lib/restkb/restaurant.alm")),
];

pub fn file_name(module: &str) -> String {
    format!("lib/restkb/{}.alm", module)
}

pub fn source_names() -> SourceNames {
    SourceNames {
        modules: MODULES.iter().map(|(m, _)| (m.to_string(), file_name(m))).collect(),
        structure: None,
    }
}

/// The parsed theory, without a structure.
pub fn theory() -> SystemDescriptionAst {
    let sources: Vec<(String, &str)> = MODULES.iter().map(|(m, src)| (file_name(m), *src)).collect();
    let pairs: Vec<(&str, &str)> = sources.iter().map(|(f, s)| (f.as_str(), *s)).collect();
    parse_system_description(&pairs).expect("embedded library parses")
}

/// Resolve and check the library alone.
pub fn load_library() -> (Option<ResolvedLibrary>, Diagnostics) {
    Theory::bundled().load()
}

/// Resolve and check the library together with a structure.
pub fn load_with_structure(structure: StructureAst, structure_file: &str) -> (Option<ResolvedLibrary>, Diagnostics) {
    Theory::bundled().load_with_structure(structure, structure_file)
}

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("no .alm files in {0}")]
    Empty(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A library to reason with: the bundled one, or modules read from disk.
#[derive(Debug, Clone)]
pub struct Theory {
    pub ast: SystemDescriptionAst,
    pub names: SourceNames,
    pub lints: LintConfig,
}

impl Default for Theory {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Theory {
    pub fn bundled() -> Self {
        Theory { ast: theory(), names: source_names(), lints: LintConfig::default() }
    }

    /// Modules from `(file name, text)` pairs. A structure, if present, is kept.
    pub fn from_sources(sources: &[(String, String)]) -> Result<Self, ParseError> {
        let ast = parse_system_description(sources)?;
        let mut names = SourceNames::default();
        for (file, src) in sources {
            let one = parse_system_description(&[(file.as_str(), src.as_str())])?;
            for m in one.theory {
                names.modules.insert(m.name, file.clone());
            }
            if one.structure.is_some() {
                names.structure = Some(file.clone());
            }
        }
        Ok(Theory { ast, names, lints: LintConfig::default() })
    }

    /// Every `.alm` file in `dir`, in name order.
    pub fn from_dir(dir: &Path) -> Result<Self, TheoryError> {
        let io = |e| TheoryError::Io { path: dir.display().to_string(), source: e };
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "alm"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(TheoryError::Empty(dir.display().to_string()));
        }
        let sources = files
            .iter()
            .map(|p| {
                std::fs::read_to_string(p)
                    .map(|s| (p.display().to_string(), s))
                    .map_err(|e| TheoryError::Io { path: p.display().to_string(), source: e })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_sources(&sources)?)
    }

    pub fn with_lints(mut self, lints: LintConfig) -> Self {
        self.lints = lints;
        self
    }

    pub fn load(&self) -> (Option<ResolvedLibrary>, Diagnostics) {
        analyze(&self.ast, &self.names, &self.lints)
    }

    pub fn load_with_structure(&self, structure: StructureAst, structure_file: &str) -> (Option<ResolvedLibrary>, Diagnostics) {
        let mut ast = self.ast.clone();
        ast.structure = Some(structure);
        let mut names = self.names.clone();
        names.structure = Some(structure_file.to_string());
        analyze(&ast, &names, &self.lints)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ModuleSummary {
    pub name: String,
    pub imports: Vec<String>,
    pub classes: Vec<String>,
    pub action_classes: Vec<String>,
    pub inertial_fluents: Vec<String>,
    pub defined_fluents: Vec<String>,
    pub statics: Vec<String>,
    pub axioms: usize,
}

/// Inventory of a resolved library.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Manifest {
    pub modules: Vec<ModuleSummary>,
    pub classes: usize,
    pub action_classes: usize,
    pub inertial_fluents: usize,
    pub axioms: usize,
    pub depth: usize,
    pub imports: BTreeMap<String, Vec<String>>,
}

pub fn describe(lib: &ResolvedLibrary) -> Manifest {
    let modules: Vec<ModuleSummary> = lib
        .modules
        .values()
        .map(|m| {
            let classes: Vec<String> = lib
                .user_classes()
                .filter(|c| c.module.as_deref() == Some(&m.name))
                .map(|c| c.name.clone())
                .collect();
            let action_classes = classes.iter().filter(|c| lib.is_action_class(c)).cloned().collect();
            let fns = |pred: &dyn Fn(&crate::syntax::FunctionDecl) -> bool| -> Vec<String> {
                lib.functions
                    .values()
                    .filter(|f| f.module == m.name && pred(&f.decl))
                    .map(|f| f.decl.name.clone())
                    .collect()
            };
            ModuleSummary {
                name: m.name.clone(),
                imports: m.imports.clone(),
                action_classes,
                classes,
                inertial_fluents: fns(&|d| d.is_basic_fluent()),
                defined_fluents: fns(&|d| d.is_defined_fluent()),
                statics: fns(&|d| d.kind == crate::syntax::FunctionKind::Static),
                axioms: lib.axioms.iter().filter(|a| a.module == m.name).count(),
            }
        })
        .collect();
    Manifest {
        classes: modules.iter().map(|m| m.classes.len()).sum(),
        action_classes: modules.iter().map(|m| m.action_classes.len()).sum(),
        inertial_fluents: modules.iter().map(|m| m.inertial_fluents.len()).sum(),
        axioms: lib.axioms.len(),
        depth: lib.depth(),
        imports: lib.module_graph(),
        modules,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_is_clean() {
        let (lib, d) = load_library();
        assert!(d.is_empty(), "{}", d.render_text());
        let m = describe(&lib.unwrap());
        assert_eq!((m.classes, m.action_classes, m.inertial_fluents, m.depth), (30, 19, 17, 3));
        assert!(m.axioms >= 80, "{}", m.axioms);
        assert!(m.modules.iter().all(|s| s.axioms <= 50));
    }
}
