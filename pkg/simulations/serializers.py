from rest_framework import serializers

from circuits.hamiltonians import ConstantCoupling, ParametricCoupling, UniformRandomCoupling

from .disorder import NOISE_PARAMETERS, NOISE_POLICIES, RANDOMIZABLE, EnsembleConfig
from .dynamics import METHODS, IntegratorConfig, NoiseRates
from .exceptions import ConfigurationError
from .measures import MEASURE_KINDS, EntanglementReport, GateReport, TruthRow, TruthTable
from .scenarios import HAMILTONIAN_KINDS, ScenarioSpec

COUPLING_KINDS = ('constant', 'parametric', 'uniform_random')


class CouplingSerializer(serializers.Serializer):
    """One coupling model; which fields apply depends on kind"""
    kind = serializers.ChoiceField(choices=COUPLING_KINDS, default='constant')
    g_m = serializers.FloatField(required=False, min_value=0.0)
    g0 = serializers.FloatField(required=False)
    omega_m = serializers.FloatField(required=False)
    lo = serializers.FloatField(required=False, min_value=0.0)
    hi = serializers.FloatField(required=False, min_value=0.0)

    REQUIRED = {
        'constant': ('g_m',),
        'parametric': ('g_m', 'omega_m'),
        'uniform_random': ('lo', 'hi'),
    }

    def validate(self, data):
        missing = [name for name in self.REQUIRED[data['kind']] if name not in data]
        if missing:
            raise serializers.ValidationError({name: f"required for {data['kind']} coupling" for name in missing})
        if data['kind'] == 'parametric' and data['omega_m'] <= 0:
            raise serializers.ValidationError({'omega_m': 'must be > 0'})
        if data['kind'] == 'uniform_random' and data['lo'] > data['hi']:
            raise serializers.ValidationError({'hi': 'must be >= lo'})
        return data

    def create(self, validated_data):
        kind = validated_data['kind']
        if kind == 'constant':
            return ConstantCoupling(validated_data['g_m'])
        if kind == 'parametric':
            return ParametricCoupling(validated_data.get('g0', 0.0), validated_data['g_m'], validated_data['omega_m'])
        return UniformRandomCoupling(validated_data['lo'], validated_data['hi'])


class NoiseSerializer(serializers.Serializer):
    gamma_down = serializers.FloatField(default=0.0, min_value=0.0)
    gamma_up = serializers.FloatField(default=0.0, min_value=0.0)
    eta = serializers.FloatField(default=0.0, min_value=0.0)


class IntegratorSerializer(serializers.Serializer):
    """Missing values fall back to settings.SIMULATION"""
    rel_tol = serializers.FloatField(required=False, min_value=1e-15)
    abs_tol = serializers.FloatField(required=False, min_value=1e-15)
    t_max = serializers.FloatField(required=False, min_value=1e-9)
    grid_points = serializers.IntegerField(required=False, min_value=2, max_value=1_000_000)
    method = serializers.ChoiceField(choices=METHODS, required=False)


class EnsembleSerializer(serializers.Serializer):
    realizations = serializers.IntegerField(required=False, min_value=1)
    master_seed = serializers.IntegerField(required=False, min_value=0, max_value=2 ** 64 - 1)
    n_jobs = serializers.IntegerField(required=False)


class ScenarioSpecSerializer(serializers.Serializer):
    """
    Scenario configuration (JSON files and catalog presets).

    A file may name a preset in `base`; its remaining fields are merged over
    the preset before validation (see load_scenario in runner).
    """
    base = serializers.CharField(required=False, write_only=True)
    name = serializers.CharField(max_length=100)
    qubits = serializers.ChoiceField(choices=[2, 3])
    frequencies = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=3)
    couplings = CouplingSerializer(many=True)
    initial = serializers.RegexField(r'^[01]{2,3}$')
    noise = NoiseSerializer(required=False)
    random_noise = serializers.DictField(
        child=serializers.ListField(child=serializers.FloatField(min_value=0.0), min_length=2, max_length=2),
        required=False,
    )
    noise_policy = serializers.ChoiceField(choices=NOISE_POLICIES, default='shared')
    joint_draw = serializers.ListField(child=serializers.ChoiceField(choices=RANDOMIZABLE), required=False)
    hamiltonian = serializers.ChoiceField(choices=HAMILTONIAN_KINDS, default='rwa')
    integrator = IntegratorSerializer(required=False)
    ensemble = EnsembleSerializer(required=False)
    description = serializers.CharField(required=False, allow_blank=True, default='')
    reference_values = serializers.BooleanField(default=True)

    def validate_random_noise(self, value):
        unknown = sorted(set(value) - set(NOISE_PARAMETERS))
        if unknown:
            raise serializers.ValidationError(f"unknown noise parameters {unknown}; choose from {NOISE_PARAMETERS}")
        for name, (lo, hi) in value.items():
            if lo > hi:
                raise serializers.ValidationError(f"{name}: lo must be <= hi")
        return value

    def validate(self, data):
        """Cross-field checks are delegated to ScenarioSpec and reported per field"""
        try:
            data['spec'] = self._build(data)
        except ConfigurationError as exc:
            raise serializers.ValidationError(exc.errors or str(exc))
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return data

    def _build(self, data) -> ScenarioSpec:
        couplings = tuple(CouplingSerializer().create(c) for c in data['couplings'])
        return ScenarioSpec(
            name=data['name'],
            qubits=data['qubits'],
            frequencies=tuple(data['frequencies']),
            couplings=couplings,
            initial=data['initial'],
            noise=NoiseRates(**data.get('noise', {})),
            random_noise={name: tuple(bounds) for name, bounds in data.get('random_noise', {}).items()},
            noise_policy=data['noise_policy'],
            joint_draw=tuple(data.get('joint_draw', ())),
            hamiltonian=data['hamiltonian'],
            integrator=IntegratorConfig.from_settings(**data.get('integrator', {})),
            ensemble=EnsembleConfig.from_settings(**data.get('ensemble', {})),
            description=data.get('description', ''),
            reference_values=data['reference_values'],
        )

    def create(self, validated_data):
        return validated_data['spec']


class GateReportSerializer(serializers.Serializer):
    target_state = serializers.CharField()
    gate_time = serializers.FloatField()
    peak_probability = serializers.FloatField(min_value=0.0, max_value=1.0)

    def create(self, validated_data):
        return GateReport(**validated_data)


class EntanglementReportSerializer(serializers.Serializer):
    measure_kind = serializers.ChoiceField(choices=MEASURE_KINDS)
    times = serializers.ListField(child=serializers.FloatField())
    values = serializers.ListField(child=serializers.FloatField())

    def create(self, validated_data):
        return EntanglementReport(**validated_data)


class TruthRowSerializer(serializers.Serializer):
    output = serializers.RegexField(r'^[01]{2,3}$')
    probability = serializers.FloatField(min_value=0.0, max_value=1.0)


class TruthTableSerializer(serializers.Serializer):
    """Most likely output per basis input at the gate time"""
    t_g = serializers.FloatField(min_value=0.0)
    rows = serializers.DictField(child=TruthRowSerializer())

    def create(self, validated_data):
        rows = {label: TruthRow(**row) for label, row in validated_data['rows'].items()}
        return TruthTable(t_g=validated_data['t_g'], rows=rows)


class RunSummarySerializer(serializers.Serializer):
    """Summary JSON; parsing it back gives an equal RunSummary"""
    scenario = serializers.CharField()
    qubits = serializers.IntegerField()
    seed = serializers.IntegerField(allow_null=True)
    realizations = serializers.IntegerField(min_value=1)
    gate = GateReportSerializer()
    entanglement = EntanglementReportSerializer(many=True)
    final_populations = serializers.ListField(child=serializers.FloatField())
    runtime = serializers.FloatField(min_value=0.0)
    diagnostics = serializers.DictField(child=serializers.FloatField())
    outputs = serializers.DictField(child=serializers.CharField(), required=False, default=dict)
    truth_table = TruthTableSerializer(required=False, allow_null=True, default=None)

    def create(self, validated_data):
        from .runner import RunSummary

        return RunSummary(
            scenario=validated_data['scenario'],
            qubits=validated_data['qubits'],
            seed=validated_data['seed'],
            realizations=validated_data['realizations'],
            gate=GateReportSerializer().create(validated_data['gate']),
            entanglement=[EntanglementReportSerializer().create(e) for e in validated_data['entanglement']],
            final_populations=list(validated_data['final_populations']),
            runtime=validated_data['runtime'],
            diagnostics=dict(validated_data['diagnostics']),
            outputs=dict(validated_data['outputs']),
            truth_table=(
                TruthTableSerializer().create(validated_data['truth_table'])
                if validated_data.get('truth_table') is not None else None
            ),
        )
