"""
Tipos de domínio da marcha do bípede planar de n elos.
Os tipos carregam dados e métodos de conveniência; a lógica numérica fica nos serviços.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple, List

import numpy as np

from marcha_app.core.constantes import ClassificacaoGuarda, ModoImpulso


def _array_imutavel(valores, dtype=float) -> np.ndarray:
    array = np.array(valores, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ParametrosBipede:
    """
    Constantes cinemáticas e dinâmicas da cadeia de n elos.

    O elo 1 parte do pé de apoio, o elo (n+1)/2 é o tronco e os elos seguintes
    formam a perna de balanço a partir do quadril. As distâncias ao centro de
    massa são medidas a partir da junta proximal na ordem da cadeia.
    """
    n: int
    comprimentos: np.ndarray
    distancias_com: np.ndarray
    massas: np.ndarray
    inercias: np.ndarray
    gravidade: float = 9.81

    def __post_init__(self):
        for nome in ('comprimentos', 'distancias_com', 'massas', 'inercias'):
            object.__setattr__(self, nome, _array_imutavel(getattr(self, nome)))

    @property
    def indice_torso(self) -> int:
        """Índice (base zero) do tronco."""
        return (self.n - 1) // 2

    @property
    def massa_total(self) -> float:
        return float(np.sum(self.massas))

    @cached_property
    def matriz_coeficientes(self) -> np.ndarray:
        """
        Coeficientes A tais que o centro de massa do elo j é s + sum_i A[j, i] e_i.

        Os elos da perna de balanço partem do quadril, portanto não passam pelo tronco.
        """
        n = self.n
        torso = self.indice_torso
        coeficientes = np.zeros((n, n))
        for j in range(n):
            for i in range(j):
                if j > torso and i == torso:
                    continue
                coeficientes[j, i] = self.comprimentos[i]
            coeficientes[j, j] = self.distancias_com[j]
        coeficientes.setflags(write=False)
        return coeficientes

    @cached_property
    def matriz_inercia_cruzada(self) -> np.ndarray:
        """B = A^T diag(m) A, fator constante da matriz de massa em ângulos absolutos."""
        a = self.matriz_coeficientes
        b = a.T @ (self.massas[:, None] * a)
        b.setflags(write=False)
        return b

    @cached_property
    def momentos_massa(self) -> np.ndarray:
        """b_i = sum_j m_j A[j, i]."""
        b = self.matriz_coeficientes.T @ self.massas
        b.setflags(write=False)
        return b

    @cached_property
    def matriz_transformacao(self) -> np.ndarray:
        """T com theta = T q, q = (q1, q2)."""
        n = self.n
        t = np.zeros((n, n))
        t[:, n - 1] = 1.0
        for k in range(1, n):
            t[k, :k] = 1.0
        t.setflags(write=False)
        return t

    @cached_property
    def comprimentos_pe(self) -> np.ndarray:
        """Comprimentos usados na posição do pé de balanço (tronco excluído)."""
        comprimentos = np.array(self.comprimentos, dtype=float)
        comprimentos[self.indice_torso] = 0.0
        comprimentos.setflags(write=False)
        return comprimentos


@dataclass(frozen=True, eq=False)
class Estado:
    """Coordenadas generalizadas x = (q1, q2, dq1, dq2)."""
    q1: np.ndarray
    q2: float
    dq1: np.ndarray
    dq2: float

    def __post_init__(self):
        object.__setattr__(self, 'q1', _array_imutavel(self.q1))
        object.__setattr__(self, 'dq1', _array_imutavel(self.dq1))
        object.__setattr__(self, 'q2', float(self.q2))
        object.__setattr__(self, 'dq2', float(self.dq2))

    @property
    def n(self) -> int:
        return self.q1.size + 1

    @property
    def q(self) -> np.ndarray:
        return np.append(self.q1, self.q2)

    @property
    def dq(self) -> np.ndarray:
        return np.append(self.dq1, self.dq2)

    def como_vetor(self) -> np.ndarray:
        return np.concatenate([self.q, self.dq])

    @classmethod
    def de_vetor(cls, x: np.ndarray) -> 'Estado':
        x = np.asarray(x, dtype=float)
        n = x.size // 2
        return cls(q1=x[:n - 1], q2=x[n - 1], dq1=x[n:2 * n - 1], dq2=x[2 * n - 1])

    @classmethod
    def de_coordenadas(cls, q: np.ndarray, dq: np.ndarray) -> 'Estado':
        return cls.de_vetor(np.concatenate([q, dq]))


@dataclass(frozen=True, eq=False)
class EstadoAbsoluto:
    """Ângulos absolutos theta (anti-horário a partir da vertical) e velocidades."""
    theta: np.ndarray
    dtheta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'theta', _array_imutavel(self.theta))
        object.__setattr__(self, 'dtheta', _array_imutavel(self.dtheta))


@dataclass(frozen=True, eq=False)
class EstadoEstendido:
    """Coordenadas estendidas q_e = (q, s_x, s_y) com a posição do pé de apoio."""
    q_e: np.ndarray
    dq_e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'q_e', _array_imutavel(self.q_e))
        object.__setattr__(self, 'dq_e', _array_imutavel(self.dq_e))

    @classmethod
    def de_estado(cls, estado: Estado) -> 'EstadoEstendido':
        """Pé de apoio na origem e parado antes do impacto."""
        return cls(q_e=np.append(estado.q, [0.0, 0.0]), dq_e=np.append(estado.dq, [0.0, 0.0]))


@dataclass(frozen=True, eq=False)
class MapaReetiquetagem:
    """Parte linear V e afim Pi da troca de pernas."""
    v: np.ndarray
    pi: np.ndarray


@dataclass(frozen=True, eq=False)
class ParametrosVhc:
    """
    Parâmetros das VHCs senoidais
    theta_j = a_j theta_1 + k_j pi + G_j sin(H_j theta_1), j = 2..n.
    """
    a: np.ndarray
    k: np.ndarray
    g: np.ndarray
    h: np.ndarray
    theta1_i: float

    def __post_init__(self):
        object.__setattr__(self, 'a', _array_imutavel(self.a))
        object.__setattr__(self, 'k', _array_imutavel(self.k, dtype=int))
        object.__setattr__(self, 'g', _array_imutavel(self.g))
        object.__setattr__(self, 'h', _array_imutavel(self.h))
        object.__setattr__(self, 'theta1_i', float(self.theta1_i))

    @property
    def n(self) -> int:
        return self.a.size + 1

    def como_dicionario(self) -> dict:
        """Nome do parâmetro (ex.: 'G5') -> valor, para j = 2..n."""
        valores = {}
        for indice in range(self.a.size):
            j = indice + 2
            valores[f'a{j}'] = float(self.a[indice])
            valores[f'k{j}'] = int(self.k[indice])
            valores[f'G{j}'] = float(self.g[indice])
            valores[f'H{j}'] = float(self.h[indice])
        return valores


@dataclass(frozen=True, eq=False)
class DefinicaoMarcha:
    """
    VHC em coordenadas generalizadas: Phi_c(q2) = inclinacao_c q2 + deslocamento_c
    + sum(amplitude sin(frequencia q2)).
    """
    parametros: ParametrosVhc
    inclinacao: np.ndarray
    deslocamento: np.ndarray
    termos: Tuple[Tuple[Tuple[float, float], ...], ...]

    @property
    def theta1_i(self) -> float:
        return self.parametros.theta1_i


@dataclass(frozen=True, eq=False)
class DinamicaZero:
    """
    Dinâmica zero ddq2 = alpha1 + alpha2 dq2^2 com integrais acumuladas desde q2 = 0.

    As soluções densas guardam (integral de alpha2, potencial virtual) em cada sentido.
    """
    marcha: DefinicaoMarcha
    parametros: ParametrosBipede
    intervalo: Tuple[float, float]
    solucao_positiva: object
    solucao_negativa: object

    def integrais(self, q2: float) -> Tuple[float, float]:
        """Retorna (Psi(q2), P(q2))."""
        if q2 >= 0.0:
            integral_alfa2, potencial = self.solucao_positiva.sol(q2)
        else:
            integral_alfa2, potencial = self.solucao_negativa.sol(q2)
        return float(np.exp(-2.0 * integral_alfa2)), float(potencial)


@dataclass(frozen=True, eq=False)
class Orbita:
    """Órbita alvo: nível c* da integral de movimento passando pela âncora."""
    dinamica_zero: DinamicaZero
    ancora: Tuple[float, float]
    c_estrela: float
    potencial_min: float
    potencial_max: float

    @property
    def marcha(self) -> DefinicaoMarcha:
        return self.dinamica_zero.marcha

    @property
    def parametros(self) -> ParametrosBipede:
        return self.dinamica_zero.parametros


@dataclass(frozen=True, eq=False)
class GanhosContinuos:
    """Ganhos k_p e k_d do controle que impõe a VHC."""
    kp: np.ndarray
    kd: np.ndarray


@dataclass(frozen=True, eq=False)
class ConfigAltoGanho:
    """Realização por alto ganho da entrada impulsiva."""
    lambda_: np.ndarray
    mu: float
    tolerancia_parada: float


@dataclass(frozen=True)
class Secao:
    """Seção de Poincaré q2 = q2*, com dq2 < 0."""
    q2_estrela: float
    direcao: int = -1


@dataclass(frozen=True, eq=False)
class ControladorIcpm:
    """Ponto fixo, linearização e ganho da realimentação impulsiva na seção."""
    secao: Secao
    z_estrela: np.ndarray
    a: np.ndarray
    b: np.ndarray
    k: np.ndarray
    q: np.ndarray
    r: np.ndarray

    @property
    def autovalores_malha_aberta(self) -> np.ndarray:
        return np.linalg.eigvals(self.a)

    @property
    def autovalores_malha_fechada(self) -> np.ndarray:
        return np.linalg.eigvals(self.a + self.b @ self.k)

    @property
    def raio_espectral_malha_aberta(self) -> float:
        return float(np.max(np.abs(self.autovalores_malha_aberta)))

    @property
    def raio_espectral_malha_fechada(self) -> float:
        return float(np.max(np.abs(self.autovalores_malha_fechada)))


@dataclass(frozen=True)
class ConfigSimulacao:
    """Tolerâncias e plano de execução de uma simulação."""
    rtol: float = 1e-10
    atol: float = 1e-12
    passo_maximo: float = 0.01
    tolerancia_contato: float = 1e-6
    duracao_maxima_balanco: float = 3.0
    numero_passos: int = 40
    intervalo_amostragem: float = 0.005
    modo_impulso: ModoImpulso = ModoImpulso.IDEAL
    icpm_ativo: bool = True
    semente: int = 2024
    perturbacao: float = 0.0


@dataclass(frozen=True, eq=False)
class ResultadoGuarda:
    """Altura e velocidade do pé de balanço com a classificação de guarda."""
    altura: float
    velocidade: np.ndarray
    classificacao: ClassificacaoGuarda


@dataclass(frozen=True, eq=False)
class ResultadoImpacto:
    """Estado após o impacto e impulso do solo."""
    estado: Estado
    impulso_solo: np.ndarray
    velocidade_estendida: np.ndarray
    energia_cinetica_antes: float
    energia_cinetica_depois: float


@dataclass(frozen=True, eq=False)
class TrechoBalanco:
    """Trecho integrado da fase de balanço."""
    tempos: np.ndarray
    estados: np.ndarray
    tempo_final: float
    estado_final: Estado
    evento: str
    interpolador: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def duracao(self) -> float:
        return float(self.tempo_final - self.tempos[0]) if self.tempos.size else 0.0

    def amostrar(self, tempos: np.ndarray) -> np.ndarray:
        """Estados (colunas) nos tempos pedidos, pela saída densa do integrador."""
        if self.interpolador is None:
            return np.repeat(self.estado_final.como_vetor()[:, None], np.size(tempos), axis=1)
        return np.atleast_2d(self.interpolador(tempos))


@dataclass(frozen=True, eq=False)
class ContextoMarcha:
    """Tudo o que um passo precisa: modelo, marcha, controle, seção e tolerâncias."""
    bipede: ParametrosBipede
    marcha: DefinicaoMarcha
    ganhos: GanhosContinuos
    alto_ganho: ConfigAltoGanho
    secao: Secao
    intervalo: Tuple[float, float]
    simulacao: ConfigSimulacao = field(default_factory=ConfigSimulacao)


@dataclass(frozen=True, eq=False)
class ResultadoPasso:
    """Composição impulso, balanço, impacto, reetiquetagem e balanço até a seção."""
    estado_inicial: Estado
    estado_apos_impulso: Estado
    estado_toque: Estado
    impacto: ResultadoImpacto
    guarda: ResultadoGuarda
    estado_reetiquetado: Estado
    estado_final: Estado
    trechos: List[TrechoBalanco]
    duracao: float
    comprimento_passo: float


@dataclass(frozen=True, eq=False)
class RegistroPasso:
    """Registro de um passo da execução em malha fechada."""
    k: int
    z: np.ndarray
    impulso: np.ndarray
    norma_erro: float
    duracao: float
    estado_toque: Estado
    impulso_solo: np.ndarray
    energia_antes: float
    energia_depois: float
    energia_cinetica_antes: float
    energia_cinetica_depois: float
    classificacao: ClassificacaoGuarda
    comprimento_passo: float

    @property
    def variacao_energia_cinetica(self) -> float:
        return self.energia_cinetica_depois - self.energia_cinetica_antes


@dataclass(frozen=True, eq=False)
class RegistroTrajetoria:
    """Série temporal amostrada da execução."""
    tempos: np.ndarray
    theta: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    energia: np.ndarray


@dataclass(frozen=True, eq=False)
class ResultadoMarcha:
    """Resultado de uma execução de N passos."""
    registros: List[RegistroPasso]
    trajetoria: RegistroTrajetoria
    falha: Optional[str] = None

    @property
    def tempo_total(self) -> float:
        return float(sum(registro.duracao for registro in self.registros))


@dataclass(frozen=True)
class VerificacaoInvariante:
    """Resultado nomeado de uma verificação numérica."""
    nome: str
    aprovado: bool
    valor: float
    limite: float
    detalhe: str = ''


@dataclass(frozen=True, eq=False)
class ResultadoResolucaoVhc:
    """Parâmetros resolvidos e diagnóstico do solver."""
    parametros: ParametrosVhc
    residuos: np.ndarray
    avaliacoes: int
    livres: Tuple[str, ...] = field(default_factory=tuple)
