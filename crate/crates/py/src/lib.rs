//! Python bindings. Structured results cross the boundary as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use valmono_core::algebra::{fmt_uni, uni_from_any, UniPoly};
use valmono_core::blowup::trace_jsonl;
use valmono_core::orchestrator::MasterState;
use valmono_core::successors::{next_successor, verify_immediate_successor, LowerLattice};
use valmono_core::valuation::{fixtures, ValuationSpec};

fn err(e: valmono_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn uni(spec: &ValuationSpec, s: &str) -> PyResult<UniPoly> {
    uni_from_any(&serde_json::Value::String(s.to_string()), spec.vars(), spec.x_var()).map_err(err)
}

#[pyclass(name = "Spec", frozen)]
#[derive(Clone)]
struct PySpec(ValuationSpec);

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ValuationSpec::from_json_str(text).map(PySpec).map_err(err)
    }

    /// One of `weights`, `keyed`, `augmented`, `limit`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PySpec(match name {
            "weights" => fixtures::weighted_xyz(),
            "keyed" => fixtures::keyed_xyz(),
            "augmented" => fixtures::augmented_key_xyz(),
            "limit" => fixtures::limit_xyz(),
            other => return Err(PyValueError::new_err(format!("unknown builtin spec `{other}`"))),
        }))
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn vars(&self) -> Vec<String> {
        self.0.vars().as_ref().clone()
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn value(&self, poly: &str) -> PyResult<String> {
        let p = uni(&self.0, poly)?;
        Ok(self.0.value_uni(&p).map_err(err)?.to_string())
    }

    /// `(epsilon, smallest maximizing order)`.
    fn epsilon(&self, poly: &str) -> PyResult<(String, Option<usize>)> {
        let r = self.0.epsilon(&uni(&self.0, poly)?).map_err(err)?;
        Ok((r.epsilon.to_string(), r.b))
    }

    /// `(truncated value, delta)`.
    fn truncated_value(&self, key: &str, poly: &str) -> PyResult<(String, usize)> {
        let r = self.0.truncated_value(&uni(&self.0, key)?, &uni(&self.0, poly)?).map_err(err)?;
        Ok((r.value.to_string(), r.delta))
    }

    /// Next key after `key` with its certificate as JSON.
    fn next_successor(&self, key: &str) -> PyResult<(String, String)> {
        let q = uni(&self.0, key)?;
        let lower = LowerLattice::new(&self.0, q.var(), std::slice::from_ref(&q), q.deg()).map_err(err)?;
        let (p, cert) = next_successor(&self.0, &q, std::slice::from_ref(&q), &lower).map_err(err)?;
        Ok((fmt_uni(&p), cert.to_json().to_string()))
    }

    fn is_immediate_successor(&self, key: &str, candidate: &str) -> PyResult<bool> {
        let q = uni(&self.0, key)?;
        let lower = LowerLattice::new(&self.0, q.var(), std::slice::from_ref(&q), q.deg()).map_err(err)?;
        Ok(verify_immediate_successor(&self.0, &q, &uni(&self.0, candidate)?, &lower).map_err(err)?.holds)
    }

    fn __repr__(&self) -> String {
        format!("Spec({})", self.0.to_json())
    }
}

/// Monomialization state: a frame, the key chain and the blow-up budget.
#[pyclass(name = "State")]
struct PyState(MasterState);

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (spec, budget = 10_000))]
    fn new(spec: &PySpec, budget: usize) -> PyResult<Self> {
        MasterState::new(spec.0.clone(), budget).map(PyState).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        MasterState::from_json(&v).map(PyState).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn params(&self) -> Vec<String> {
        self.0.frame().params().as_ref().clone()
    }

    fn blowups(&self) -> usize {
        self.0.frame().blowups()
    }

    fn trace_jsonl(&self) -> String {
        trace_jsonl(self.0.frame())
    }

    fn push_limit_key(&mut self, key: &str) -> PyResult<()> {
        let q = uni(self.0.spec(), key)?;
        self.0.push_limit_key(q);
        Ok(())
    }

    /// Monomial certificate as JSON.
    fn monomialize(&mut self, poly: &str) -> PyResult<String> {
        let f = uni(&self.0.spec().clone(), poly)?;
        Ok(self.0.monomialize(&f).map_err(err)?.to_json().to_string())
    }

    /// `(order by value, certificates as JSON)`.
    fn uniformize(&mut self, polys: Vec<String>) -> PyResult<(Vec<usize>, Vec<String>)> {
        let spec = self.0.spec().clone();
        let fs = polys.iter().map(|p| uni(&spec, p)).collect::<PyResult<Vec<_>>>()?;
        let u = self.0.embedded_uniformize(&fs).map_err(err)?;
        Ok((u.order.clone(), u.certificates.iter().map(|c| c.to_json().to_string()).collect()))
    }
}

#[pymodule]
fn valmono(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyState>()?;
    Ok(())
}
