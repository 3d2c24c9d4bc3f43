//! Fee-redistribution smart contracts.
//!
//! A contract `(nu, lambda, rho)` holds `nu` satoshi and pays `nu / lambda` to
//! the miner of every block, while receiving its `rho` share of the contract
//! portion of that block's fees. With constant fees the balance converges to
//! `lambda * c * rho * fees`, so the payout becomes a moving average of past
//! fees over roughly `lambda` blocks.
//!
//! All arithmetic is integer satoshi with floor division. Remainders from the
//! payout division stay inside the contract; the rounding remainder of the
//! deposit split goes to the last contract in list order. Together these make
//! every block settle exactly: no satoshi is created or destroyed.

use num_rational::Ratio;

use crate::amount::{Amount, Ppm, PPM_ONE};
use crate::error::{Error, Result};

/// One contract: accumulated balance, window length in blocks and share of
/// incoming contract fees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frsc {
    nu: Amount,
    lambda: u64,
    rho: Ppm,
}

impl Frsc {
    pub fn new(nu: Amount, lambda: u64, rho: Ppm) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        Ok(Frsc { nu, lambda, rho })
    }

    pub fn nu(&self) -> Amount {
        self.nu
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn rho(&self) -> Ppm {
        self.rho
    }

    /// The payout this contract owes the miner of the next block,
    /// `floor(nu / lambda)`.
    pub fn partial_claim(&self) -> Amount {
        self.nu.div_floor(self.lambda)
    }
}

/// The contract share `c` and miner share `m` of a block's fees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SplitParams {
    c: Ppm,
    m: Ppm,
}

impl SplitParams {
    pub fn new(c: Ppm, m: Ppm) -> Result<Self> {
        let sum = c.value() as u64 + m.value() as u64;
        if sum != PPM_ONE as u64 {
            return Err(Error::SplitSum(sum));
        }
        Ok(SplitParams { c, m })
    }

    /// Builds the split from the contract share alone.
    pub fn from_contract_share(c: Ppm) -> Self {
        SplitParams { c, m: c.complement() }
    }

    /// Everything goes to the miner; equivalent to running without contracts.
    pub fn miner_only() -> Self {
        Self::from_contract_share(Ppm::ZERO)
    }

    pub fn contract_share(&self) -> Ppm {
        self.c
    }

    pub fn miner_share(&self) -> Ppm {
        self.m
    }

    /// Portion of `fees` deposited into the contracts, `floor(fees * c)`.
    pub fn deposit(&self, fees: Amount) -> Amount {
        fees.mul_ppm(self.c)
    }

    /// Portion of `fees` paid directly to the miner. Computed as the
    /// complement of [`SplitParams::deposit`], never as `fees * m`.
    pub fn miner_direct(&self, fees: Amount) -> Amount {
        fees - self.deposit(fees)
    }
}

/// How one block's fees and contract payouts were settled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSettlement {
    pub reward_total: Amount,
    pub next_claim: Amount,
    pub miner_direct: Amount,
    pub deposit_total: Amount,
    pub per_contract_claims: Vec<Amount>,
    pub per_contract_deposits: Vec<Amount>,
}

impl BlockSettlement {
    /// Settlement of a block mined without any contracts: the miner takes
    /// every claimed satoshi.
    pub fn without_contracts(block_fees: Amount) -> Self {
        BlockSettlement {
            reward_total: block_fees,
            next_claim: Amount::ZERO,
            miner_direct: block_fees,
            deposit_total: Amount::ZERO,
            per_contract_claims: Vec::new(),
            per_contract_deposits: Vec::new(),
        }
    }
}

/// A non-empty, ordered set of contracts whose `rho` sum to exactly one.
///
/// The order is fixed at construction and never changes; it decides which
/// contract absorbs the deposit rounding remainder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrscSet {
    contracts: Vec<Frsc>,
}

impl FrscSet {
    pub fn new(contracts: Vec<Frsc>) -> Result<Self> {
        if contracts.is_empty() {
            return Err(Error::EmptyContractSet);
        }
        let sum: u64 = contracts.iter().map(|x| x.rho.value() as u64).sum();
        if sum != PPM_ONE as u64 {
            return Err(Error::RhoSum(sum));
        }
        Ok(FrscSet { contracts })
    }

    /// Genesis state: each contract starts at
    /// `floor(floor(mean_fees * c) * rho) * lambda`.
    pub fn init_genesis(mean_fees: Amount, params: SplitParams, specs: &[(u64, Ppm)]) -> Result<Self> {
        let contract_fees = mean_fees.mul_ppm(params.contract_share());
        let contracts = specs
            .iter()
            .map(|&(lambda, rho)| {
                let per_block = contract_fees.mul_ppm(rho);
                let nu = per_block.sat().checked_mul(lambda).expect("genesis balance overflow");
                Frsc::new(Amount::from_sat(nu), lambda, rho)
            })
            .collect::<Result<Vec<_>>>()?;
        FrscSet::new(contracts)
    }

    pub fn contracts(&self) -> &[Frsc] {
        &self.contracts
    }

    pub fn len(&self) -> usize {
        self.contracts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    pub fn total_nu(&self) -> Amount {
        self.contracts.iter().map(|x| x.nu).sum()
    }

    /// Sum of every contract's partial claim: what the next block's miner
    /// receives from the contracts.
    pub fn next_claim(&self) -> Amount {
        self.contracts.iter().map(Frsc::partial_claim).sum()
    }

    /// `rewardT` a miner would receive for a block claiming `block_fees` on
    /// top of this state, without building the successor state.
    pub fn reward_for(&self, block_fees: Amount, params: SplitParams) -> Amount {
        self.next_claim() + params.miner_direct(block_fees)
    }

    /// Settles one block on top of this state and returns the settlement
    /// together with the successor state.
    pub fn apply_block(&self, block_fees: Amount, params: SplitParams) -> (BlockSettlement, FrscSet) {
        let per_contract_claims: Vec<Amount> = self.contracts.iter().map(Frsc::partial_claim).collect();
        let next_claim: Amount = per_contract_claims.iter().sum();

        let deposit_total = params.deposit(block_fees);
        let miner_direct = block_fees - deposit_total;

        let last = self.contracts.len() - 1;
        let mut per_contract_deposits = Vec::with_capacity(self.contracts.len());
        let mut assigned = Amount::ZERO;
        for (i, x) in self.contracts.iter().enumerate() {
            let d = if i == last {
                deposit_total - assigned
            } else {
                deposit_total.mul_ppm(x.rho)
            };
            assigned += d;
            per_contract_deposits.push(d);
        }

        let contracts = self
            .contracts
            .iter()
            .zip(per_contract_claims.iter().zip(&per_contract_deposits))
            .map(|(x, (&claim, &deposit))| Frsc {
                nu: x.nu - claim + deposit,
                ..*x
            })
            .collect();

        let settlement = BlockSettlement {
            reward_total: next_claim + miner_direct,
            next_claim,
            miner_direct,
            deposit_total,
            per_contract_claims,
            per_contract_deposits,
        };
        (settlement, FrscSet { contracts })
    }

    /// `rho`-weighted mean window length, exact.
    pub fn effective_lambda(&self) -> Ratio<u64> {
        let weighted: u64 = self.contracts.iter().map(|x| x.rho.value() as u64 * x.lambda).sum();
        Ratio::new(weighted, PPM_ONE as u64)
    }

    /// Copy of this set with every balance multiplied by `num / den`,
    /// rounded half up.
    pub fn scale_balances(&self, num: u64, den: u64) -> FrscSet {
        let contracts = self
            .contracts
            .iter()
            .map(|x| {
                let scaled = (x.nu.sat() as u128 * num as u128 * 2 + den as u128) / (2 * den as u128);
                Frsc {
                    nu: Amount::from_sat(scaled as u64),
                    ..*x
                }
            })
            .collect();
        FrscSet { contracts }
    }
}

/// Block-fee level at which `rewardT` equals the block's full fees:
/// `floor(next_claim / c)`.
pub fn parity_fees(next_claim: Amount, params: SplitParams) -> Result<Amount> {
    let c = params.contract_share().value();
    if c == 0 {
        return Err(Error::ZeroContractShare);
    }
    Ok(next_claim.mul_div_floor(PPM_ONE as u64, c as u64))
}
