//! Python bindings. Names follow the Rust API; errors become `KeyError` for
//! unknown names and `ValueError` otherwise.

use nebfca::navigation::Metric;
use nebfca::query::evaluate_names;
use nebfca::scaling::ScalePlan;
use nebfca::workspace::{export_cxt, import_cxt, lattice_to_dot, parse_records};
use nebfca::{
    enumerate_concepts, fixtures, parse, purify, reduce, AttributeValue, BrowseSession, ConceptLattice,
    ConceptualKnowledgeSystem, Error, Filters, FormalContext, ManyValuedContext, Seed, SharedSpace, SharingLink,
    ViewSpec, WorkspaceDocument,
};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::IntoPyObjectExt;

fn err(e: Error) -> PyErr {
    match e {
        Error::Unknown { .. } => PyKeyError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn plan_from(json: Option<&str>, mv: &ManyValuedContext) -> PyResult<ScalePlan> {
    match json {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string())),
        None => Ok(ScalePlan::nominal(mv)),
    }
}

type Concept = (Vec<String>, Vec<String>);

#[pyclass(name = "ManyValuedContext", module = "nebfca", frozen)]
struct PyManyValued {
    inner: ManyValuedContext,
}

#[pymethods]
impl PyManyValued {
    /// Parse a record file (`field: value` blocks separated by blank lines).
    #[staticmethod]
    fn from_records(text: &str) -> PyResult<Self> {
        Ok(PyManyValued {
            inner: parse_records(text).map_err(err)?,
        })
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.objects().to_vec()
    }

    #[getter]
    fn sorts(&self) -> Vec<String> {
        self.inner.sorts().to_vec()
    }

    /// The cell as `str`, `int` or `None`; dates come back as ISO strings.
    fn value(&self, py: Python<'_>, object: &str, tag: &str) -> PyResult<Py<PyAny>> {
        match self.inner.value(object, tag).map_err(err)? {
            AttributeValue::Missing => Ok(py.None()),
            AttributeValue::Integer(i) => i.into_py_any(py),
            other => other.to_string().into_py_any(py),
        }
    }

    /// Objects matching a descriptive name.
    fn query(&self, q: &str) -> PyResult<Vec<String>> {
        let q = parse(q).map_err(|e| err(e.into()))?;
        evaluate_names(&q, &self.inner, None).map_err(err)
    }

    /// Scale into a formal context; `plan` is JSON, nominal on every sort if omitted.
    #[pyo3(signature = (plan=None))]
    fn scale(&self, plan: Option<&str>) -> PyResult<PyFormalContext> {
        let plan = plan_from(plan, &self.inner)?;
        Ok(PyFormalContext {
            inner: nebfca::scale(&self.inner, &plan).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.objects().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "<ManyValuedContext {} objects x {} sorts>",
            self.inner.objects().len(),
            self.inner.sorts().len()
        )
    }
}

#[pyclass(name = "FormalContext", module = "nebfca", frozen)]
struct PyFormalContext {
    inner: FormalContext,
}

#[pymethods]
impl PyFormalContext {
    #[new]
    fn new(objects: Vec<String>, attributes: Vec<String>, pairs: Vec<(String, String)>) -> PyResult<Self> {
        Ok(PyFormalContext {
            inner: FormalContext::from_pairs(objects, attributes, pairs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_cxt(text: &str) -> PyResult<Self> {
        Ok(PyFormalContext {
            inner: import_cxt(text).map_err(err)?,
        })
    }

    fn to_cxt(&self) -> String {
        export_cxt(&self.inner)
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.objects().to_vec()
    }

    #[getter]
    fn attributes(&self) -> Vec<String> {
        self.inner.attributes().to_vec()
    }

    fn pairs(&self) -> Vec<(String, String)> {
        self.inner
            .pairs()
            .into_iter()
            .map(|(g, m)| (g.to_string(), m.to_string()))
            .collect()
    }

    fn derive_intent(&self, objects: Vec<String>) -> PyResult<Vec<String>> {
        self.inner.derive_intent(&objects).map_err(err)
    }

    fn derive_extent(&self, attributes: Vec<String>) -> PyResult<Vec<String>> {
        self.inner.derive_extent(&attributes).map_err(err)
    }

    fn lattice(&self) -> PyLattice {
        PyLattice {
            inner: enumerate_concepts(&self.inner),
        }
    }

    /// The purified context and the merged object groups.
    fn purify(&self) -> (PyFormalContext, Vec<Vec<String>>) {
        let (ctx, report) = purify(&self.inner);
        (PyFormalContext { inner: ctx }, report.objects)
    }

    /// The reduced context and the removed attributes.
    fn reduce(&self) -> (PyFormalContext, Vec<String>) {
        let (ctx, report) = reduce(&self.inner);
        (PyFormalContext { inner: ctx }, report.removed_attributes)
    }

    fn __eq__(&self, other: &PyFormalContext) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "<FormalContext {} objects x {} attributes>",
            self.inner.n_objects(),
            self.inner.n_attributes()
        )
    }
}

#[pyclass(name = "Lattice", module = "nebfca", frozen)]
struct PyLattice {
    inner: ConceptLattice,
}

#[pymethods]
impl PyLattice {
    /// `(extent, intent)` per concept, in canonical order.
    fn concepts(&self) -> Vec<Concept> {
        let ctx = self.inner.context();
        self.inner
            .concepts()
            .iter()
            .map(|c| (c.extent_names(ctx), c.intent_names(ctx)))
            .collect()
    }

    /// `(lower, upper)` concept indices.
    fn covers(&self) -> Vec<(usize, usize)> {
        self.inner.cover_relation().to_vec()
    }

    /// Reduced `(objects, attributes)` labels per concept.
    fn labels(&self) -> Vec<Concept> {
        let l = self.inner.labels();
        l.objects.into_iter().zip(l.attributes).collect()
    }

    #[getter]
    fn top(&self) -> usize {
        self.inner.top()
    }

    #[getter]
    fn bottom(&self) -> usize {
        self.inner.bottom()
    }

    fn depth(&self, concept: usize) -> PyResult<usize> {
        if concept < self.inner.len() {
            Ok(self.inner.depth(concept))
        } else {
            Err(PyValueError::new_err(format!("no concept {concept}")))
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_document()).expect("lattice serializes")
    }

    fn to_dot(&self) -> String {
        lattice_to_dot(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "KnowledgeSystem", module = "nebfca", frozen)]
struct PyKnowledgeSystem {
    inner: ConceptualKnowledgeSystem,
}

#[pymethods]
impl PyKnowledgeSystem {
    /// `views` holds `(name, scope, constructor)` triples.
    #[new]
    #[pyo3(signature = (context, views, plan=None))]
    fn new(context: &PyManyValued, views: Vec<(String, Vec<String>, String)>, plan: Option<&str>) -> PyResult<Self> {
        let plan = plan_from(plan, &context.inner)?;
        let specs = views
            .into_iter()
            .map(|(name, scope, constructor)| {
                let scope: Vec<&str> = scope.iter().map(String::as_str).collect();
                ViewSpec::new(name, &scope, constructor)
            })
            .collect();
        Ok(PyKnowledgeSystem {
            inner: ConceptualKnowledgeSystem::new(context.inner.clone(), plan, specs).map_err(err)?,
        })
    }

    fn views(&self) -> Vec<String> {
        self.inner.views().iter().map(|v| v.name.clone()).collect()
    }

    fn resolve(&self, view: &str) -> PyResult<Vec<String>> {
        self.inner.resolve_view(view).map_err(err)
    }

    /// Rows of the closed incidence matrix as `X`/`.` strings.
    fn closure_rows(&self) -> Vec<String> {
        self.inner
            .incidence_closure()
            .block_rows()
            .iter()
            .map(|r| r.iter().map(|&b| if b { 'X' } else { '.' }).collect())
            .collect()
    }

    fn extended_context(&self) -> PyResult<PyFormalContext> {
        Ok(PyFormalContext {
            inner: self.inner.extend_context().map_err(err)?,
        })
    }
}

#[pyclass(name = "SharedSpace", module = "nebfca", frozen)]
struct PySharedSpace {
    inner: SharedSpace,
}

#[pymethods]
impl PySharedSpace {
    #[getter]
    fn spaces(&self) -> Vec<String> {
        self.inner.space_ids().to_vec()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.classes().to_vec()
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.objects().to_vec()
    }

    /// Objects of every space contained in `space/view`.
    fn resolve(&self, class: &str) -> PyResult<Vec<String>> {
        let (space, view) = class
            .split_once('/')
            .ok_or_else(|| PyValueError::new_err(format!("`{class}` is not of the form space/view")))?;
        self.inner.resolve_across(space, view).map_err(err)
    }

    /// `(object, class)` pairs whose object and class belong to different spaces.
    fn cross_instantiation(&self) -> Vec<(String, String)> {
        let inst = self.inner.instantiation();
        let mut out = Vec::new();
        for g in 0..self.inner.objects().len() {
            for c in 0..self.inner.classes().len() {
                if inst.get(g, c) && self.inner.object_space(g) != self.inner.class_space(c) {
                    out.push((self.inner.objects()[g].clone(), self.inner.classes()[c].clone()));
                }
            }
        }
        out
    }

    fn to_context(&self) -> PyResult<PyFormalContext> {
        Ok(PyFormalContext {
            inner: self.inner.to_context().map_err(err)?,
        })
    }
}

#[pyclass(name = "BrowseSession", module = "nebfca")]
struct PyBrowseSession {
    inner: BrowseSession,
}

#[pymethods]
impl PyBrowseSession {
    #[new]
    fn new(context: &PyFormalContext) -> Self {
        PyBrowseSession {
            inner: BrowseSession::new(context.inner.clone()),
        }
    }

    /// Concepts around an object or attribute, as `(extent, intent)` pairs.
    #[pyo3(signature = (seed, threshold=1, top_k=None, radius=None, max_concepts=None))]
    fn neighborhood(
        &mut self,
        seed: &str,
        threshold: usize,
        top_k: Option<usize>,
        radius: Option<f64>,
        max_concepts: Option<usize>,
    ) -> PyResult<Vec<Concept>> {
        let ctx = self.inner.context();
        let seed = if ctx.object_position(seed).is_some() {
            Seed::Object(seed.to_string())
        } else if ctx.attribute_position(seed).is_some() {
            Seed::Attribute(seed.to_string())
        } else {
            return Err(PyKeyError::new_err(format!("unknown object or attribute `{seed}`")));
        };
        let mut filters = Filters::none().with_threshold(threshold);
        if let Some(k) = top_k {
            filters = filters.with_top_k(k);
        }
        if let Some(r) = radius {
            filters = filters.with_ball(Metric::Jaccard, r);
        }
        filters.max_concepts = max_concepts;
        let hood = self.inner.browse(seed, &filters).map_err(err)?;
        Ok(hood
            .to_document()
            .concepts
            .into_iter()
            .map(|c| (c.extent, c.intent))
            .collect())
    }

    fn similarity(&self, a: &str, b: &str) -> PyResult<f64> {
        self.inner.similarity(a, b, "jaccard").map_err(err)
    }
}

#[pyclass(name = "Workspace", module = "nebfca")]
struct PyWorkspace {
    inner: WorkspaceDocument,
}

#[pymethods]
impl PyWorkspace {
    #[new]
    fn new() -> Self {
        PyWorkspace {
            inner: WorkspaceDocument::new(),
        }
    }

    /// Every bundled example in one document.
    #[staticmethod]
    fn demo() -> Self {
        PyWorkspace {
            inner: fixtures::demo_workspace(),
        }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyWorkspace {
            inner: WorkspaceDocument::load(path.as_ref()).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyWorkspace {
            inner: WorkspaceDocument::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path.as_ref()).map_err(err)
    }

    fn contexts(&self) -> Vec<String> {
        self.inner.contexts.keys().cloned().collect()
    }

    fn context(&self, name: &str) -> PyResult<PyManyValued> {
        Ok(PyManyValued {
            inner: self.inner.context(name).map_err(err)?.clone(),
        })
    }

    fn put_context(&mut self, name: &str, context: &PyManyValued) -> PyResult<()> {
        self.inner.put_context(name, context.inner.clone()).map_err(err)
    }

    fn formal_context(&self, name: &str) -> PyResult<PyFormalContext> {
        Ok(PyFormalContext {
            inner: self.inner.formal_context(name).map_err(err)?,
        })
    }

    fn system(&self, name: &str) -> PyResult<PyKnowledgeSystem> {
        Ok(PyKnowledgeSystem {
            inner: self.inner.system(name).map_err(err)?,
        })
    }

    fn query(&self, context: &str, q: &str) -> PyResult<Vec<String>> {
        let q = parse(q).map_err(|e| err(e.into()))?;
        evaluate_names(&q, self.inner.context(context).map_err(err)?, None).map_err(err)
    }

    #[pyo3(signature = (context, name, scope, constructor="*"))]
    fn add_view(&mut self, context: &str, name: &str, scope: Vec<String>, constructor: &str) -> PyResult<()> {
        let scope: Vec<&str> = scope.iter().map(String::as_str).collect();
        self.inner
            .add_view(context, ViewSpec::new(name, &scope, constructor))
            .map_err(err)
    }

    fn add_link(&mut self, source: &str, target: &str) -> PyResult<()> {
        let link = SharingLink::parse(source, target).map_err(err)?;
        self.inner.add_link(link).map_err(err)
    }

    #[pyo3(signature = (spaces=None))]
    fn shared(&self, spaces: Option<Vec<String>>) -> PyResult<PySharedSpace> {
        Ok(PySharedSpace {
            inner: self.inner.shared(&spaces.unwrap_or_default()).map_err(err)?,
        })
    }
}

#[pymodule]
#[pyo3(name = "nebfca")]
fn nebfca_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyManyValued>()?;
    m.add_class::<PyFormalContext>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyKnowledgeSystem>()?;
    m.add_class::<PySharedSpace>()?;
    m.add_class::<PyBrowseSession>()?;
    m.add_class::<PyWorkspace>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
