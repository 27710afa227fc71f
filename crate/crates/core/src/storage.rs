//! Share containers and storage-site backends.
//!
//! Container layout, all integers big-endian:
//!
//! ```text
//! "KXSH" | version u8 = 1 | scheme u8 | n u8 | index u8 | blockBits u16 | flags u8
//! | plaintextLen u64 | ivShare (if flags bit 0) | fragLen u64 | fragment | crc32 u32
//! ```
//!
//! Flags: bit 0 IV share present, bit 1 interleaved fragmentation, bit 2
//! Bastion even-padding applied. Blocks occupy `ceil(blockBits / 8)` bytes;
//! `fragLen` counts blocks.

use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::block::BlockSpec;
use crate::error::{Error, Result};
use crate::schemes::{SchemeId, Share};

pub const MAGIC: &[u8; 4] = b"KXSH";
pub const VERSION: u8 = 1;
pub const FLAG_IV_SHARE: u8 = 0x01;
pub const FLAG_INTERLEAVED: u8 = 0x02;
pub const FLAG_BASTION_PAD: u8 = 0x04;
const KNOWN_FLAGS: u8 = FLAG_IV_SHARE | FLAG_INTERLEAVED | FLAG_BASTION_PAD;
/// Bytes before the optional IV share.
const FIXED_HEADER: usize = 4 + 1 + 1 + 1 + 1 + 2 + 1 + 8;
const MAX_INDEX: u8 = u8::MAX;

pub fn encode_share(share: &Share) -> Result<Vec<u8>> {
    let spec = share.spec;
    if share.n == 0 || share.index == 0 || share.index > share.n {
        return Err(Error::contract(format!(
            "share index {} out of 1..={}",
            share.index, share.n
        )));
    }
    let mut flags = 0u8;
    if share.iv_share.is_some() {
        flags |= FLAG_IV_SHARE;
    }
    if share.interleaved {
        flags |= FLAG_INTERLEAVED;
    }
    if share.bastion_padded {
        flags |= FLAG_BASTION_PAD;
    }
    let mut out = Vec::with_capacity(FIXED_HEADER + 16 + (share.fragment.len() + 1) * spec.bytes() + 12);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(share.scheme.code());
    out.push(share.n);
    out.push(share.index);
    out.extend_from_slice(&(spec.bits() as u16).to_be_bytes());
    out.push(flags);
    out.extend_from_slice(&share.plaintext_len.to_be_bytes());
    if let Some(iv) = share.iv_share {
        spec.write_block(spec.check(iv)?, &mut out);
    }
    out.extend_from_slice(&(share.fragment.len() as u64).to_be_bytes());
    for &b in &share.fragment {
        spec.write_block(spec.check(b)?, &mut out);
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::TruncatedContainer(format!("{what} runs past the end")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_share(bytes: &[u8]) -> Result<Share> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < FIXED_HEADER + 8 + 4 {
        return Err(Error::TruncatedContainer(format!("{} bytes", bytes.len())));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_be_bytes(tail.try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }
    let mut r = Reader { bytes: body, pos: 4 };
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let code = r.u8("scheme")?;
    let scheme = SchemeId::from_code(code)
        .ok_or_else(|| Error::BadHeader(format!("unknown scheme code {code}")))?;
    let n = r.u8("n")?;
    let index = r.u8("index")?;
    if n == 0 || index == 0 || index > n {
        return Err(Error::BadHeader(format!("index {index} of n = {n}")));
    }
    let bits = r.u16("blockBits")? as u32;
    let spec = BlockSpec::new(bits).map_err(|_| Error::BadHeader(format!("block width {bits}")))?;
    let flags = r.u8("flags")?;
    if flags & !KNOWN_FLAGS != 0 {
        return Err(Error::BadHeader(format!("unknown flags {flags:#04x}")));
    }
    if (flags & FLAG_IV_SHARE != 0) != scheme.has_iv_share() {
        return Err(Error::BadHeader(format!("IV-share flag disagrees with {scheme}")));
    }
    let plaintext_len = r.u64("plaintextLen")?;
    let read_block = |r: &mut Reader, what: &str| {
        let raw = r.take(spec.bytes(), what)?;
        spec.block_from_bytes(raw)
            .map_err(|_| Error::BadHeader(format!("{what} exceeds {bits} bits")))
    };
    let iv_share = if flags & FLAG_IV_SHARE != 0 {
        Some(read_block(&mut r, "ivShare")?)
    } else {
        None
    };
    let frag_len = r.u64("fragLen")?;
    let remaining = (body.len() - r.pos) as u64;
    if frag_len.checked_mul(spec.bytes() as u64) != Some(remaining) {
        return Err(Error::TruncatedContainer(format!(
            "fragLen {frag_len} blocks but {remaining} payload bytes"
        )));
    }
    let fragment = (0..frag_len)
        .map(|_| read_block(&mut r, "fragment"))
        .collect::<Result<Vec<_>>>()?;
    Ok(Share {
        scheme,
        index,
        n,
        spec,
        iv_share,
        fragment,
        plaintext_len,
        interleaved: flags & FLAG_INTERLEAVED != 0,
        bastion_padded: flags & FLAG_BASTION_PAD != 0,
    })
}

/// Object name under which share `index` of `object` is stored.
pub fn share_object_name(object: &str, index: u8) -> String {
    format!("{object}.{index}.kxsh")
}

/// One storage site. `get` after `put` returns identical bytes.
pub trait StorageSite: Send + Sync {
    fn put(&self, name: &str, bytes: &[u8]) -> Result<()>;
    /// `Ok(None)` when the object is absent.
    fn get(&self, name: &str) -> Result<Option<Vec<u8>>>;
    fn list(&self) -> Result<Vec<String>>;
    fn delete(&self, name: &str) -> Result<()>;
}

#[derive(Debug, Default)]
pub struct MemorySite {
    objects: Mutex<BTreeMap<String, Vec<u8>>>,
}

impl MemorySite {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&self) {
        self.objects.lock().expect("site lock").clear();
    }
}

impl StorageSite for MemorySite {
    fn put(&self, name: &str, bytes: &[u8]) -> Result<()> {
        self.objects
            .lock()
            .expect("site lock")
            .insert(name.to_owned(), bytes.to_vec());
        Ok(())
    }

    fn get(&self, name: &str) -> Result<Option<Vec<u8>>> {
        Ok(self.objects.lock().expect("site lock").get(name).cloned())
    }

    fn list(&self) -> Result<Vec<String>> {
        Ok(self.objects.lock().expect("site lock").keys().cloned().collect())
    }

    fn delete(&self, name: &str) -> Result<()> {
        self.objects.lock().expect("site lock").remove(name);
        Ok(())
    }
}

/// One file per object inside `root`.
#[derive(Clone, Debug)]
pub struct DirectorySite {
    root: PathBuf,
}

impl DirectorySite {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(DirectorySite { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, name: &str) -> Result<PathBuf> {
        if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
            return Err(Error::contract(format!("invalid object name '{name}'")));
        }
        Ok(self.root.join(name))
    }
}

impl StorageSite for DirectorySite {
    fn put(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path_of(name)?;
        // write-then-rename keeps concurrent readers off partial files
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    fn get(&self, name: &str) -> Result<Option<Vec<u8>>> {
        match fs::read(self.path_of(name)?) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn list(&self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let entry = entry?;
            if entry.file_type()?.is_file() {
                if let Some(name) = entry.file_name().to_str() {
                    if !name.starts_with('.') {
                        names.push(name.to_owned());
                    }
                }
            }
        }
        names.sort();
        Ok(names)
    }

    fn delete(&self, name: &str) -> Result<()> {
        match fs::remove_file(self.path_of(name)?) {
            Err(e) if e.kind() != ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }
}

/// Interface placeholder for a remote object store; every call fails.
#[derive(Clone, Debug)]
pub struct HttpSite {
    pub endpoint: String,
}

impl HttpSite {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpSite {
            endpoint: endpoint.into(),
        }
    }

    fn unavailable(&self) -> Error {
        Error::Io(format!("no HTTP transport for {}", self.endpoint))
    }
}

impl StorageSite for HttpSite {
    fn put(&self, _: &str, _: &[u8]) -> Result<()> {
        Err(self.unavailable())
    }
    fn get(&self, _: &str) -> Result<Option<Vec<u8>>> {
        Err(self.unavailable())
    }
    fn list(&self) -> Result<Vec<String>> {
        Err(self.unavailable())
    }
    fn delete(&self, _: &str) -> Result<()> {
        Err(self.unavailable())
    }
}

/// Store share `i` (1-based header index) at `sites[i - 1]`.
pub fn disperse(shares: &[Share], sites: &[&dyn StorageSite], object: &str) -> Result<Vec<String>> {
    if shares.len() != sites.len() {
        return Err(Error::contract(format!(
            "{} shares for {} sites",
            shares.len(),
            sites.len()
        )));
    }
    let mut names = Vec::with_capacity(shares.len());
    for share in shares {
        let slot = share.index as usize;
        if slot == 0 || slot > sites.len() {
            return Err(Error::contract(format!("share index {slot} has no site")));
        }
        let name = share_object_name(object, share.index);
        sites[slot - 1].put(&name, &encode_share(share)?)?;
        names.push(name);
    }
    Ok(names)
}

/// Fetch and decode share `i` from `sites[i - 1]`, ordered by index.
pub fn collect(sites: &[&dyn StorageSite], object: &str) -> Result<Vec<Share>> {
    if sites.len() > MAX_INDEX as usize {
        return Err(Error::contract("more sites than share indices"));
    }
    let mut shares = Vec::with_capacity(sites.len());
    let mut missing = Vec::new();
    for (k, site) in sites.iter().enumerate() {
        let index = k as u8 + 1;
        match site.get(&share_object_name(object, index))? {
            None => missing.push(index),
            Some(bytes) => {
                let share = decode_share(&bytes)?;
                if share.index != index {
                    return Err(Error::CorruptSet(format!(
                        "site {index} holds share {}",
                        share.index
                    )));
                }
                shares.push(share);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteSet { missing });
    }
    Ok(shares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::Block;
    use crate::rng::DeterministicRng;
    use crate::schemes::{FragmentationPolicy, Suite};
    use proptest::prelude::*;

    /// Share 1 of the 8-bit SSAKE worked example.
    fn ssake_s1() -> Share {
        Share {
            scheme: SchemeId::Ssake,
            index: 1,
            n: 2,
            spec: BlockSpec::new(8).unwrap(),
            iv_share: Some(Block(0x13)),
            fragment: vec![Block(0xAB)],
            plaintext_len: 2,
            interleaved: false,
            bastion_padded: false,
        }
    }

    // field by field: magic, v1, scheme 2, n 2, index 1, bits 8, flags 1,
    // plaintextLen 2, iv 0x13, fragLen 1, fragment 0xAB, crc32 (zlib)
    const SSAKE_S1: &str = "4b585348 01 02 02 01 0008 01 0000000000000002 13 0000000000000001 ab d3d33992";

    fn hex(s: &str) -> Vec<u8> {
        let s: String = s.split_whitespace().collect();
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap())
            .collect()
    }

    #[test]
    fn golden_fixture() {
        let bytes = hex(SSAKE_S1);
        assert_eq!(encode_share(&ssake_s1()).unwrap(), bytes);
        assert_eq!(decode_share(&bytes).unwrap(), ssake_s1());
    }

    #[test]
    fn every_single_byte_corruption_is_detected() {
        let bytes = hex(SSAKE_S1);
        for i in 0..bytes.len() {
            for flip in 1..=255u8 {
                let mut bad = bytes.clone();
                bad[i] ^= flip;
                assert!(decode_share(&bad).is_err(), "byte {i} ^ {flip:#x}");
            }
        }
    }

    #[test]
    fn header_errors() {
        let bytes = hex(SSAKE_S1);
        assert_eq!(decode_share(b"NOPE"), Err(Error::BadMagic));
        assert!(matches!(decode_share(&bytes[..20]), Err(Error::TruncatedContainer(_))));
        // rewrite the version and refresh the checksum
        let mut v2 = bytes[..bytes.len() - 4].to_vec();
        v2[4] = 2;
        let crc = crc32fast::hash(&v2);
        v2.extend_from_slice(&crc.to_be_bytes());
        assert_eq!(decode_share(&v2), Err(Error::UnsupportedVersion(2)));
        let mut bad = ssake_s1();
        bad.index = 3;
        assert!(encode_share(&bad).is_err());
    }

    #[test]
    fn odd_widths_round_trip() {
        let mut s = ssake_s1();
        s.spec = BlockSpec::new(12).unwrap();
        s.iv_share = Some(Block(0xFFF));
        s.fragment = vec![Block(0xABC), Block(1)];
        s.interleaved = true;
        let bytes = encode_share(&s).unwrap();
        assert_eq!(bytes.len(), FIXED_HEADER + 2 + 8 + 4 + 4);
        assert_eq!(decode_share(&bytes).unwrap(), s);
        s.fragment[0] = Block(0x1000);
        assert!(encode_share(&s).is_err());
    }

    fn dispersal(seed: u64, n: usize) -> Vec<Share> {
        let suite = Suite::production();
        let mut rng = DeterministicRng::new(seed);
        let key = suite.spec().random_key(&mut rng);
        suite
            .share(SchemeId::Ssake, Some(&key), b"storage test payload", n, FragmentationPolicy::Contiguous, &mut rng)
            .unwrap()
            .shares
    }

    #[test]
    fn memory_round_trip_and_missing_site() {
        let shares = dispersal(1, 3);
        let sites = [MemorySite::new(), MemorySite::new(), MemorySite::new()];
        let refs: Vec<&dyn StorageSite> = sites.iter().map(|s| s as &dyn StorageSite).collect();
        let names = disperse(&shares, &refs, "obj").unwrap();
        assert_eq!(names, ["obj.1.kxsh", "obj.2.kxsh", "obj.3.kxsh"]);
        assert_eq!(collect(&refs, "obj").unwrap(), shares);
        sites[1].clear();
        assert_eq!(collect(&refs, "obj"), Err(Error::IncompleteSet { missing: vec![2] }));
        assert!(disperse(&shares[..2], &refs, "obj").is_err());
    }

    #[test]
    fn swapped_sites_are_corrupt() {
        let shares = dispersal(2, 2);
        let (a, b) = (MemorySite::new(), MemorySite::new());
        a.put("x.1.kxsh", &encode_share(&shares[1]).unwrap()).unwrap();
        b.put("x.2.kxsh", &encode_share(&shares[0]).unwrap()).unwrap();
        assert!(matches!(collect(&[&a, &b], "x"), Err(Error::CorruptSet(_))));
    }

    #[test]
    fn directory_site_basics() {
        let dir = tempfile::tempdir().unwrap();
        let site = DirectorySite::new(dir.path()).unwrap();
        site.put("a.1.kxsh", b"xyz").unwrap();
        assert_eq!(site.get("a.1.kxsh").unwrap().unwrap(), b"xyz");
        assert_eq!(site.get("b").unwrap(), None);
        assert_eq!(site.list().unwrap(), ["a.1.kxsh"]);
        assert!(site.put("../escape", b"").is_err());
        site.delete("a.1.kxsh").unwrap();
        site.delete("a.1.kxsh").unwrap();
        assert!(site.list().unwrap().is_empty());
    }

    #[test]
    fn http_stub_refuses() {
        let site = HttpSite::new("https://storage.invalid");
        assert!(matches!(site.put("a", b""), Err(Error::Io(_))));
        assert!(site.get("a").is_err());
    }

    #[test]
    fn key_never_in_containers() {
        let suite = Suite::production();
        let mut rng = DeterministicRng::new(77);
        for scheme in SchemeId::ALL {
            for _ in 0..10 {
                let key = suite.spec().random_key(&mut rng);
                let key_bytes = suite.spec().block_to_bytes(key.0);
                let d = suite
                    .share(scheme, Some(&key), &[0u8; 100], 3, FragmentationPolicy::Contiguous, &mut rng)
                    .unwrap();
                for s in &d.shares {
                    let bytes = encode_share(s).unwrap();
                    assert!(!bytes.windows(16).any(|w| w == key_bytes.as_slice()), "{scheme}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(
            code in 0u8..8, bits in 1u32..=128, n in 1u8..=20, seed in any::<u64>(),
            len in 0usize..40, interleaved in any::<bool>(), padded in any::<bool>(), plen in any::<u64>(),
        ) {
            let spec = BlockSpec::new(bits).unwrap();
            let scheme = SchemeId::from_code(code).unwrap();
            let mut rng = DeterministicRng::new(seed);
            let share = Share {
                scheme,
                index: (rng.below(n as u64) + 1) as u8,
                n,
                spec,
                iv_share: scheme.has_iv_share().then(|| spec.random_block(&mut rng)),
                fragment: (0..len).map(|_| spec.random_block(&mut rng)).collect(),
                plaintext_len: plen,
                interleaved,
                bastion_padded: padded,
            };
            let bytes = encode_share(&share).unwrap();
            prop_assert_eq!(decode_share(&bytes).unwrap(), share);
        }
    }
}
