use crate::domain::Product;
use std::collections::HashMap;
use std::fmt;

/// Semantic identity of an LP column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarKey {
    /// b — fuel burned by a dispatchable unit, GW.
    FuelBurn { tech: String, t: usize, fuel: String },
    /// g — energy generated by a dispatchable unit, GW.
    Gen {
        tech: String,
        t: usize,
        product: Product,
        fuel: String,
    },
    /// w — convex weight on a feasible-operating-region corner.
    CornerWeight {
        tech: String,
        t: usize,
        corner: usize,
        fuel: String,
    },
    /// r — electricity generated by an intermittent unit, GW.
    IntermGen { tech: String, t: usize },
    /// s_in — storage charging, GW.
    StoreIn { tech: String, t: usize },
    /// s_out — storage discharging, GW.
    StoreOut { tech: String, t: usize },
    /// v — storage energy content, GWh.
    StoreLevel { tech: String, t: usize },
    /// x — electricity net export from `from` to `to`, GW.
    Flow { from: String, to: String, t: usize },
    /// q+ — curtailed intermittent electricity, GW.
    Curtail { zone: String, t: usize },
    /// q- — non-served energy, GW.
    Nse {
        zone: String,
        t: usize,
        product: Product,
    },
    /// Capacity adjustments, GW (GWh for storage energy).
    AddDispatch { tech: String },
    DecoDispatch { tech: String },
    AddInterm { tech: String },
    DecoInterm { tech: String },
    AddStorePower { tech: String },
    AddStoreEnergy { tech: String },
    AddFlow { from: String, to: String },
    /// Free-form key for hand-built problems.
    Named(String),
}

/// Semantic identity of an LP row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RowKey {
    ClearEl { zone: String, t: usize },
    ClearHt { zone: String, t: usize },
    CapDispatch { tech: String, t: usize, product: Product },
    FuelLink { tech: String, t: usize, product: Product, fuel: String },
    ChpCap { tech: String, t: usize },
    ChpGen { tech: String, t: usize, product: Product, fuel: String },
    ChpFuel { tech: String, t: usize, fuel: String },
    IntermDef { tech: String, t: usize },
    StoreOutCap { tech: String, t: usize },
    StoreInCap { tech: String, t: usize },
    StoreLevelCap { tech: String, t: usize },
    StoreBalance { tech: String, t: usize },
    StoreEnergyPower { tech: String },
    StoreBoundStart { tech: String },
    StoreBoundEnd { tech: String },
    FlowUpper { from: String, to: String, t: usize },
    FlowLower { from: String, to: String, t: usize },
    FlowAnti { from: String, to: String, t: usize },
    FlowExpandSym { from: String, to: String },
    Reserve { zone: String, t: usize },
    Policy { zone: String },
    WindCap { zone: String },
    CurtailCap { zone: String, t: usize },
    DecoDispatchCap { tech: String },
    DecoIntermCap { tech: String },
    Named(String),
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VarKey::*;
        match self {
            FuelBurn { tech, t, fuel } => write!(f, "b({tech},t{t},{fuel})"),
            Gen {
                tech,
                t,
                product,
                fuel,
            } => write!(f, "g({tech},t{t},{},{fuel})", product.as_str()),
            CornerWeight {
                tech,
                t,
                corner,
                fuel,
            } => write!(f, "w({tech},t{t},l{},{fuel})", corner + 1),
            IntermGen { tech, t } => write!(f, "r({tech},t{t})"),
            StoreIn { tech, t } => write!(f, "s_in({tech},t{t})"),
            StoreOut { tech, t } => write!(f, "s_out({tech},t{t})"),
            StoreLevel { tech, t } => write!(f, "v({tech},t{t})"),
            Flow { from, to, t } => write!(f, "x({from},{to},t{t})"),
            Curtail { zone, t } => write!(f, "q_curtail({zone},t{t})"),
            Nse { zone, t, product } => write!(f, "q_nse({zone},t{t},{})", product.as_str()),
            AddDispatch { tech } => write!(f, "add_g({tech})"),
            DecoDispatch { tech } => write!(f, "deco_g({tech})"),
            AddInterm { tech } => write!(f, "add_r({tech})"),
            DecoInterm { tech } => write!(f, "deco_r({tech})"),
            AddStorePower { tech } => write!(f, "add_s({tech})"),
            AddStoreEnergy { tech } => write!(f, "add_v({tech})"),
            AddFlow { from, to } => write!(f, "add_x({from},{to})"),
            Named(name) => write!(f, "{name}"),
        }
    }
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RowKey::*;
        match self {
            ClearEl { zone, t } => write!(f, "clear_el({zone},t{t})"),
            ClearHt { zone, t } => write!(f, "clear_ht({zone},t{t})"),
            CapDispatch { tech, t, product } => {
                write!(f, "cap_g({tech},t{t},{})", product.as_str())
            }
            FuelLink {
                tech,
                t,
                product,
                fuel,
            } => write!(f, "fuel_link({tech},t{t},{},{fuel})", product.as_str()),
            ChpCap { tech, t } => write!(f, "chp_cap({tech},t{t})"),
            ChpGen {
                tech,
                t,
                product,
                fuel,
            } => write!(f, "chp_gen({tech},t{t},{},{fuel})", product.as_str()),
            ChpFuel { tech, t, fuel } => write!(f, "chp_fuel({tech},t{t},{fuel})"),
            IntermDef { tech, t } => write!(f, "interm_def({tech},t{t})"),
            StoreOutCap { tech, t } => write!(f, "s_out_cap({tech},t{t})"),
            StoreInCap { tech, t } => write!(f, "s_in_cap({tech},t{t})"),
            StoreLevelCap { tech, t } => write!(f, "v_cap({tech},t{t})"),
            StoreBalance { tech, t } => write!(f, "s_balance({tech},t{t})"),
            StoreEnergyPower { tech } => write!(f, "v_ge_s({tech})"),
            StoreBoundStart { tech } => write!(f, "v_start({tech})"),
            StoreBoundEnd { tech } => write!(f, "v_end({tech})"),
            FlowUpper { from, to, t } => write!(f, "x_up({from},{to},t{t})"),
            FlowLower { from, to, t } => write!(f, "x_lo({from},{to},t{t})"),
            FlowAnti { from, to, t } => write!(f, "x_anti({from},{to},t{t})"),
            FlowExpandSym { from, to } => write!(f, "add_x_sym({from},{to})"),
            Reserve { zone, t } => write!(f, "reserve({zone},t{t})"),
            Policy { zone } => write!(f, "policy({zone})"),
            WindCap { zone } => write!(f, "wind_cap({zone})"),
            CurtailCap { zone, t } => write!(f, "curtail_cap({zone},t{t})"),
            DecoDispatchCap { tech } => write!(f, "deco_g_cap({tech})"),
            DecoIntermCap { tech } => write!(f, "deco_r_cap({tech})"),
            Named(name) => write!(f, "{name}"),
        }
    }
}

/// Bijective map between model entities and LP column/row ids.
#[derive(Debug, Clone, Default)]
pub struct VariableIndex {
    col_keys: Vec<VarKey>,
    row_keys: Vec<RowKey>,
    cols: HashMap<VarKey, usize>,
    rows: HashMap<RowKey, usize>,
}

impl VariableIndex {
    pub fn insert_col(&mut self, key: VarKey, id: usize) {
        debug_assert_eq!(id, self.col_keys.len());
        let prev = self.cols.insert(key.clone(), id);
        debug_assert!(prev.is_none(), "duplicate column key {key}");
        self.col_keys.push(key);
    }

    pub fn insert_row(&mut self, key: RowKey, id: usize) {
        debug_assert_eq!(id, self.row_keys.len());
        let prev = self.rows.insert(key.clone(), id);
        debug_assert!(prev.is_none(), "duplicate row key {key}");
        self.row_keys.push(key);
    }

    pub fn col(&self, key: &VarKey) -> Option<usize> {
        self.cols.get(key).copied()
    }

    pub fn row(&self, key: &RowKey) -> Option<usize> {
        self.rows.get(key).copied()
    }

    pub fn col_key(&self, id: usize) -> &VarKey {
        &self.col_keys[id]
    }

    pub fn row_key(&self, id: usize) -> &RowKey {
        &self.row_keys[id]
    }

    pub fn col_keys(&self) -> &[VarKey] {
        &self.col_keys
    }

    pub fn row_keys(&self) -> &[RowKey] {
        &self.row_keys
    }
}
